//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with
//! its wall time against the time limit; the process exits non-zero when any
//! criterion fails.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lacuna::cancellation::{check_classical, enumerate_pieces, hyperbolicity_bound};
use lacuna::cayley::{
    build_ball, injectivity_radius, AbelianOracle, BallBudget, FreeOracle, InjectivityRadius,
};
use lacuna::certifier::{
    certify, check_isoperimetric, closed_walks, Centers, CertificateConstants, FillOptions,
    RipsComplex, Surd, Verdict,
};
use lacuna::dehn::{DehnOracle, DehnSolver};
use lacuna::presentation::enumerate_cosets;
use lacuna::probes::{
    divergence, divergence_profile, gromov_delta_4pt, thin_triangle_delta, DivValue, FloydMetric,
    ScanMode,
};
use lacuna::rational::{int, ratio};
use lacuna::zoo::{
    alternating_powers, gen_aperiodic_words, gen_lacunary_family, lacunary_indices,
    schedule_torsion_params, ExponentRegime,
};
use lacuna::{symmetrize, Alphabet, Letter, Presentation, Rational, SymmetrizedSet, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

fn pres(text: &str) -> Presentation {
    Presentation::parse(text).unwrap()
}

// Brute-force piece list: every unordered pair of distinct words with a
// nonempty common prefix, found by direct comparison.
fn pieces_by_pairs(s: &SymmetrizedSet) -> BTreeSet<(usize, usize, String)> {
    let words: Vec<&Word> = s.words().collect();
    let mut out = BTreeSet::new();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let (x, y) = (words[i].letters(), words[j].letters());
            let n = x.iter().zip(y).take_while(|(p, q)| p == q).count();
            if n > 0 {
                out.insert((i, j, Word::from_letters(x[..n].to_vec()).to_string()));
            }
        }
    }
    out
}

fn random_cyclic_word(rng: &mut ChaCha8Rng, letters: &[Letter], max_len: usize) -> Word {
    loop {
        let len = rng.gen_range(1..=max_len);
        let raw: Vec<Letter> = (0..len)
            .map(|_| letters[rng.gen_range(0..letters.len())])
            .collect();
        let core = Word::from_letters(raw).free_reduce().cyclic_core();
        if !core.is_empty() {
            return core;
        }
    }
}

fn c1_piece_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut sets = 0;
    let mut pieces = 0;
    while sets < 24 {
        let rank = rng.gen_range(2..=3);
        let letters = Alphabet::standard(rank).letters();
        let count = rng.gen_range(1..=3);
        let rels: Vec<Word> = (0..count)
            .map(|_| random_cyclic_word(&mut rng, &letters, 6))
            .collect();
        let s = symmetrize(&rels).unwrap();
        if s.words().map(Word::len).sum::<usize>() > 200 {
            continue;
        }
        let report = enumerate_pieces(&s).map_err(|e| e.to_string())?;
        let got: BTreeSet<_> = report
            .pieces
            .iter()
            .map(|p| {
                let (i, j) = (p.occurrence_a.word, p.occurrence_b.word);
                (i.min(j), i.max(j), p.piece.to_string())
            })
            .collect();
        ensure(got.len() == report.pieces.len(), || {
            format!("duplicate pieces for {rels:?}")
        })?;
        let want = pieces_by_pairs(&s);
        ensure(got == want, || {
            format!("piece mismatch on relators {rels:?}")
        })?;
        pieces += want.len();
        sets += 1;
    }
    Ok(format!("{sets} random sets, {pieces} pieces, exact match"))
}

fn c2_genus_two() -> Result<String, String> {
    let p = pres("alphabet: a b c d\nrel: abABcdCD\n");
    let s = p.symmetrized();
    let report = enumerate_pieces(&s).map_err(|e| e.to_string())?;
    let brute = pieces_by_pairs(&s)
        .iter()
        .map(|t| t.2.len())
        .max()
        .unwrap_or(0);
    ensure(report.max_piece_len == 1 && brute == 1, || {
        format!("max piece {} (brute force {brute})", report.max_piece_len)
    })?;
    let v = check_classical(&s, &ratio(1, 6));
    ensure(v.ok && v.max_ratio == ratio(1, 8), || {
        format!("C'(1/6) verdict {v:?}")
    })?;
    Ok(format!("{} words, max piece 1, ratio 1/8 < 1/6", s.len()))
}

fn c3_hyperbolicity_constant() -> Result<String, String> {
    let p = pres("alphabet: a b c d\nrel: abABcdCD\n");
    let t = Instant::now();
    let bound = hyperbolicity_bound(&p, &ratio(1, 7)).map_err(|e| e.to_string())?;
    let took = t.elapsed();
    ensure(bound == int(4704), || format!("bound {bound}"))?;
    ensure(took < Duration::from_millis(1), || format!("took {took:?}"))?;
    Ok(format!("delta bound 4704 in {took:?}"))
}

fn reduced_words(rank: usize, max_len: usize) -> Vec<Word> {
    let letters = Alphabet::standard(rank).letters();
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for u in &frontier {
            for &x in &letters {
                let mut v = u.clone();
                v.push(x);
                if v.is_reduced() {
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn c4_dehn_soundness() -> Result<String, String> {
    // (group, finite check quotient, rank). When the quotient is the group
    // itself it is trivially faithful; for <a,b | ab> = Z the exponent sum of
    // a word of length <= 10 lies in [-10, 10], so Z/11 detects triviality.
    let cases = [
        (
            "alphabet: a\nrel: aaaaaaa\n",
            "alphabet: a\nrel: aaaaaaa\n",
            1,
        ),
        (
            "alphabet: a b\nrel: aaaaa\nrel: b\n",
            "alphabet: a b\nrel: aaaaa\nrel: b\n",
            2,
        ),
        (
            "alphabet: a b\nrel: ab\n",
            "alphabet: a b\nrel: ab\nrel: aaaaaaaaaaa\n",
            2,
        ),
    ];
    let mut total = 0usize;
    let mut trivial = 0usize;
    for (g, q, rank) in cases {
        let g = pres(g);
        ensure(check_classical(&g.symmetrized(), &ratio(1, 6)).ok, || {
            format!("{g:?} is not C'(1/6)")
        })?;
        let solver = DehnSolver::for_presentation(&g, &ratio(1, 6)).map_err(|e| e.to_string())?;
        let table = enumerate_cosets(&pres(q), &[], 1000).ok_or("quotient did not close")?;
        for word in reduced_words(rank, 10) {
            let by_coset = table.trace(0, &word) == 0;
            if solver.is_trivial(&word) != by_coset {
                return Err(format!("disagreement on {word}"));
            }
            trivial += by_coset as usize;
            total += 1;
        }
    }
    ensure(total >= 10_000, || format!("only {total} words"))?;
    Ok(format!(
        "3 presentations, {total} words, {trivial} trivial, 0 disagreements"
    ))
}

fn c5_ball_counts() -> Result<String, String> {
    let free = FreeOracle::new(Alphabet::standard(2));
    for n in 0..=8u32 {
        let len = build_ball(&free, n).map_err(|e| e.to_string())?.len();
        ensure(len == 2 * 3usize.pow(n) - 1, || {
            format!("free ball {n} has {len} vertices")
        })?;
    }
    let z2 = AbelianOracle::new(Alphabet::standard(2));
    for n in 0..=30usize {
        let len = build_ball(&z2, n as u32).map_err(|e| e.to_string())?.len();
        ensure(len == 2 * n * n + 2 * n + 1, || {
            format!("Z^2 ball {n} has {len} vertices")
        })?;
    }
    Ok("free n <= 8 (13121 at n = 8), Z^2 n <= 30 (1861 at n = 30)".into())
}

fn c6_tree_delta() -> Result<String, String> {
    let free = FreeOracle::new(Alphabet::standard(2));
    for r in 0..=6 {
        let b = build_ball(&free, r).map_err(|e| e.to_string())?;
        let (g, t) = (
            gromov_delta_4pt(&b, 0).map_err(|e| e.to_string())?,
            thin_triangle_delta(&b).map_err(|e| e.to_string())?,
        );
        ensure(g == int(0) && t == int(0), || {
            format!("free radius {r}: gromov {g}, thin {t}")
        })?;
    }
    let z2 = AbelianOracle::new(Alphabet::standard(2));
    let mut worst = String::new();
    for r in 4..=16 {
        let b = build_ball(&z2, r).map_err(|e| e.to_string())?;
        let g = gromov_delta_4pt(&b, 0).map_err(|e| e.to_string())?;
        let t = thin_triangle_delta(&b).map_err(|e| e.to_string())?;
        ensure(t <= int(4) * &g + int(1), || {
            format!("Z^2 radius {r}: thin {t} > 4*{g} + 1")
        })?;
        worst = format!("radius 16: gromov {g}, thin {t}");
    }
    Ok(format!(
        "free radii 0..6 exactly 0; Z^2 radii 4..16 satisfy thin <= 4 gromov + 1 ({worst})"
    ))
}

// Lattice BFS in Z^2 avoiding the closed L1 ball of radius rho around c.
fn lattice_detour(
    a: (i32, i32),
    b: (i32, i32),
    c: (i32, i32),
    rho: &Rational,
    bound: i32,
) -> Option<u32> {
    let blocked = |p: (i32, i32)| int(((p.0 - c.0).abs() + (p.1 - c.1).abs()) as i64) <= *rho;
    let mut seen = HashSet::from([a]);
    let mut queue = VecDeque::from([(a, 0u32)]);
    while let Some((p, d)) = queue.pop_front() {
        if p == b {
            return Some(d);
        }
        for q in [
            (p.0 + 1, p.1),
            (p.0 - 1, p.1),
            (p.0, p.1 + 1),
            (p.0, p.1 - 1),
        ] {
            if q.0.abs() + q.1.abs() <= bound && !blocked(q) && seen.insert(q) {
                queue.push_back((q, d + 1));
            }
        }
    }
    None
}

fn c7_divergence() -> Result<String, String> {
    let b =
        build_ball(&AbelianOracle::new(Alphabet::standard(2)), 24).map_err(|e| e.to_string())?;
    let at = |s: &str| b.locate(&w(s)).unwrap();
    let third = ratio(1, 3);
    let v =
        divergence(&b, at("AA"), at("aa"), at(""), &third, &int(0)).map_err(|e| e.to_string())?;
    let oracle = lattice_detour((-2, 0), (2, 0), (0, 0), &(&third * int(2)), 24);
    ensure(v == DivValue::Finite(6) && oracle == Some(6), || {
        format!("divergence {v}, lattice oracle {oracle:?}")
    })?;
    let p = divergence_profile(&b, 8, &third, &int(2), &ScanMode::Exhaustive)
        .map_err(|e| e.to_string())?;
    ensure(p.entries.len() == 8, || {
        format!("{} profile entries", p.entries.len())
    })?;
    ensure(
        p.entries.windows(2).all(|e| e[0].value <= e[1].value),
        || "profile decreases".into(),
    )?;
    let c = p.linear_constant.clone().ok_or("no linear fit")?;
    ensure(c <= int(3), || format!("linear constant {c}"))?;
    let values: Vec<String> = p.entries.iter().map(|e| e.value.to_string()).collect();
    Ok(format!(
        "Div(AA, aa; 1) = 6; Div(1..8) = [{}], C = {c}, {} triples",
        values.join(", "),
        p.triples
    ))
}

fn c8_floyd() -> Result<String, String> {
    // pi^2/3 = 3.2898681336964528...; 3.289868134 <= pi^2/3 + 1e-9.
    let (num, den) = (3_289_868_134u128, 1_000_000_000u128);
    let free = FreeOracle::new(Alphabet::standard(2));
    let mut best = Rational::from_integer(0.into());
    let mut pairs = 0u64;
    for r in 1..=8 {
        let b = build_ball(&free, r).map_err(|e| e.to_string())?;
        let m = FloydMetric::new(&b).map_err(|e| e.to_string())?;
        let mut max = 0u128;
        for u in 0..b.len() as u32 {
            max = max.max(m.scaled_from(u).into_iter().max().unwrap_or(0));
            pairs += b.len() as u64;
        }
        ensure(
            max.checked_mul(den).ok_or("overflow")? < num * m.scale(),
            || {
                format!(
                    "radius {r}: Floyd distance {} too large",
                    m.to_rational(max)
                )
            },
        )?;
        best = best.max(m.to_rational(max));
    }
    Ok(format!(
        "{pairs} pairs, largest {best} ~ {:.6} < pi^2/3",
        lacuna::rational::to_f64(&best)
    ))
}

fn c9_certificate() -> Result<String, String> {
    let standard = CertificateConstants::standard();
    ensure(
        standard.c1 == 32
            && standard.c2 == 32000
            && standard.c == ratio(1, 4_096_000)
            && standard.c3 == Surd::new(int(400), 500)
            && standard.c3.squared() == int(80_000_000)
            && !standard.test_only,
        || format!("constants {standard:?}"),
    )?;
    let free = build_ball(&FreeOracle::new(Alphabet::standard(2)), 8).map_err(|e| e.to_string())?;
    for d in [0u64, 1, 4, 8, 12] {
        let cert = certify(&free, d, 4, &standard, Centers::Identity).map_err(|e| e.to_string())?;
        ensure(cert.constants == standard, || "constants not echoed".into())?;
        ensure(cert.rho == int(32000 * d.max(1) as i64), || {
            format!("rho {} for D = {d}", cert.rho)
        })?;
        ensure(matches!(cert.verdict, Verdict::Inconclusive(_)), || {
            format!("{:?}", cert.verdict)
        })?;
    }
    let test = CertificateConstants::test();
    let pass = certify(&free, 1, 4, &test, Centers::All).map_err(|e| e.to_string())?;
    ensure(pass.verdict == Verdict::Pass, || {
        format!("free ball: {:?}", pass.verdict)
    })?;
    let z2 =
        build_ball(&AbelianOracle::new(Alphabet::standard(2)), 16).map_err(|e| e.to_string())?;
    let fail = certify(&z2, 4, 8, &test, Centers::Identity).map_err(|e| e.to_string())?;
    ensure(fail.verdict == Verdict::Fail, || {
        format!("Z^2 ball: {:?}", fail.verdict)
    })?;
    let delta = fail.local_delta.clone().unwrap();
    Ok(format!("32, 32000, 1/4096000, 400 sqrt 500, rho = 32000 D; test mode PASS on F2, FAIL on Z^2 (4 delta = {} > {})", int(4) * delta, fail.threshold))
}

fn c10_isoperimetric() -> Result<String, String> {
    let ball = build_ball(&FreeOracle::new(Alphabet::standard(2)), 8).map_err(|e| e.to_string())?;
    let rc = RipsComplex::from_ball(&ball, 4, &int(1)).map_err(|e| e.to_string())?;
    ensure(rc.triangles().is_empty(), || {
        "tree Rips complex has triangles".into()
    })?;
    let opts = FillOptions::default();
    let mut loops = 0u64;
    for base in 0..rc.len() as u32 {
        for walk in closed_walks(&rc, base, 8) {
            let chk = check_isoperimetric(&rc, &walk, &int(0), &opts).map_err(|e| e.to_string())?;
            ensure(chk.holds && chk.cells == 0, || {
                format!("loop {walk:?}: {chk:?}")
            })?;
            loops += 1;
        }
    }
    Ok(format!(
        "{} vertices, {loops} loops of length <= 8, all filled with area 0",
        rc.len()
    ))
}

// 6th-power-free positive words over {a, b}, counted by direct inspection.
fn aperiodic_oracle(len: usize) -> usize {
    (0u32..1 << len)
        .filter(|bits| {
            let s: Vec<bool> = (0..len).map(|k| bits >> k & 1 == 1).collect();
            !(1..=len / 6).any(|p| {
                (0..=len - 6 * p).any(|st| (st..st + 6 * p).all(|k| s[k] == s[st + (k - st) % p]))
            })
        })
        .count()
}

fn c11_aperiodic() -> Result<String, String> {
    let mut counts = Vec::new();
    for i in 0..=14usize {
        let n = gen_aperiodic_words(i, 6).len();
        ensure(n == aperiodic_oracle(i), || {
            format!("length {i}: {n} words, oracle {}", aperiodic_oracle(i))
        })?;
        ensure((n as u64) << i >= 3u64.pow(i as u32), || {
            format!("length {i}: {n} < (3/2)^{i}")
        })?;
        counts.push(n);
    }
    ensure(counts[6] == 62, || format!("length 6 gives {}", counts[6]))?;
    Ok(format!("counts {counts:?}"))
}

fn c12_schedule() -> Result<String, String> {
    let s = schedule_torsion_params(
        3,
        243,
        &[int(0), int(1), int(2)],
        &[int(0), int(1), int(3)],
        2,
    )
    .map_err(|e| e.to_string())?;
    ensure(s.d[1] == 2, || format!("d_1 = {}", s.d[1]))?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut regimes = HashSet::new();
    let mut runs = 0;
    while runs < 6 {
        let r_max = rng.gen_range(2..=4);
        let mut phi = vec![int(0), int(1)];
        for _ in 2..=r_max {
            let last = phi.last().unwrap().clone().max(int(2));
            phi.push(last + ratio(rng.gen_range(0..4), 2));
        }
        let delta: Vec<Rational> = (0..=r_max)
            .map(|_| ratio(rng.gen_range(0..40), 3))
            .collect();
        let p = [3u64, 5, 7][rng.gen_range(0..3)];
        let n0 = p.pow(rng.gen_range(1..=5));
        let s = schedule_torsion_params(p, n0, &phi, &delta, r_max).map_err(|e| e.to_string())?;
        for r in 1..=r_max {
            let f2 = &phi[r] * &phi[r];
            let bound = (&f2 * int(s.d[r - 1] as i64))
                .max(&f2 * &delta[r])
                .max(int(2));
            let least = (1u64..).find(|&d| int(d as i64) >= bound).unwrap();
            ensure(s.d[r] == least, || {
                format!("d_{r} = {} but least admissible is {least}", s.d[r])
            })?;
            for q in r + 1..=r_max {
                let (a, b) = (int(s.d[r] as i64) / &phi[r], int(s.d[r] as i64) * &phi[r]);
                let (c, d) = (int(s.d[q] as i64) / &phi[q], int(s.d[q] as i64) * &phi[q]);
                ensure(b <= c || d <= a, || {
                    format!("intervals {r} and {q} overlap")
                })?;
            }
        }
        for i in 1..=s.i[r_max] {
            let r = (1..=r_max)
                .find(|&r| s.i[r - 1] < i && i <= s.i[r])
                .unwrap();
            let lower = int(i as i64) < int(s.d[r] as i64) / &phi[r];
            let want = if lower {
                let mut q = n0 as u128;
                while q * (i as u128) < s.d[r] as u128 {
                    q *= p as u128;
                }
                q
            } else {
                n0 as u128
            };
            let regime = if lower {
                ExponentRegime::Lower
            } else {
                ExponentRegime::Upper
            };
            ensure(
                s.regime(i) == Some(regime) && s.n_a(i) == Some(want),
                || {
                    format!(
                        "rank {i}: got {:?} {:?}, want {regime:?} {want}",
                        s.regime(i),
                        s.n_a(i)
                    )
                },
            )?;
            regimes.insert(regime);
        }
        runs += 1;
    }
    ensure(regimes.len() == 2, || format!("regimes seen: {regimes:?}"))?;
    Ok(format!(
        "d = {:?}; {runs} random schedules minimal and disjoint, both n_A regimes checked",
        s.d
    ))
}

fn dehn_oracle(p: &Presentation) -> Result<DehnOracle, String> {
    DehnOracle::new(p, &ratio(1, 6)).map_err(|e| e.to_string())
}

fn c13_injectivity() -> Result<String, String> {
    let free = FreeOracle::new(Alphabet::standard(2));
    let cube = dehn_oracle(&pres("alphabet: a b\nrel: aaa\n"))?;
    let r1 =
        injectivity_radius(&free, &cube, 4, BallBudget::default()).map_err(|e| e.to_string())?;
    ensure(r1 == InjectivityRadius::Exactly(1), || {
        format!("free -> <a,b|a^3>: {r1:?}")
    })?;
    let (fam, report) = gen_lacunary_family(
        &alternating_powers,
        "powers",
        &lacunary_indices(3),
        3,
        &[],
        &ratio(1, 6),
    )
    .map_err(|e| e.to_string())?;
    ensure(report.spectrum.starts_with(&[2, 16]), || {
        format!("spectrum {:?}", report.spectrum)
    })?;
    let g1 = dehn_oracle(&fam.up_to_tier(1))?;
    let g2 = dehn_oracle(&fam.up_to_tier(2))?;
    let r2 = injectivity_radius(&g1, &g2, 8, BallBudget::default()).map_err(|e| e.to_string())?;
    let ok = match r2 {
        InjectivityRadius::Exactly(r) | InjectivityRadius::AtLeast(r) => r >= 7,
    };
    ensure(ok, || format!("tier 1 -> tier 2: {r2:?}"))?;
    Ok(format!(
        "free -> <a,b|a^3>: exactly 1; tier 1 -> tier 2 (spectrum {:?}): {r2:?}",
        report.spectrum
    ))
}

struct Run {
    code: Option<i32>,
    stdout: Vec<u8>,
    stderr: Vec<u8>,
    report: Vec<u8>,
}

fn lacuna_run(dir: &Path, args: &[String], threads: Option<&str>, tag: &str) -> Run {
    let out = dir.join(format!("report-{tag}"));
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lacuna"));
    cmd.current_dir(dir).args(args).arg("--out").arg(&out);
    if let Some(t) = threads {
        cmd.args(["--threads", t]);
    }
    let o = cmd.output().expect("binary runs");
    let report = std::fs::read(&out).unwrap_or_default();
    let _ = std::fs::remove_file(&out);
    Run {
        code: o.status.code(),
        stdout: o.stdout,
        stderr: o.stderr,
        report,
    }
}

fn c14_determinism() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let files = [
        ("g2.pres", "alphabet: a b c d\nrel: abABcdCD\n"),
        ("z2.pres", "alphabet: a b\nrel: abAB\n"),
        ("f2.pres", "alphabet: a b\n"),
        (
            "z3.pres",
            "alphabet: a b c\nrel: abAB\nrel: acAC\nrel: bcBC\n",
        ),
        ("rels.pres", "alphabet: a b c\nrel: aabbc\nrel: ababC\n"),
        (
            "fam.pres",
            "alphabet: a b\ntier 1:\nrel: aa\ntier 2:\nrel: bbbbbbbbbbbbbbbb\n",
        ),
        (
            "sched.json",
            r#"{"alpha":"1/100","k":"1000000","tiers":[{"epsilon":1,"mu":"1/200","rho":"1000000000","max_relator_len":"10"}]}"#,
        ),
    ];
    for (name, text) in files {
        std::fs::write(dir.join(name), text).map_err(|e| e.to_string())?;
    }
    let setup: [&[&str]; 3] = [
        &[
            "ball", "--pres", "z2.pres", "--radius", "12", "--oracle", "abelian", "--out",
            "z2.json",
        ],
        &[
            "ball", "--pres", "f2.pres", "--radius", "8", "--oracle", "free", "--out", "f2.json",
        ],
        &[
            "ball", "--pres", "g2.pres", "--radius", "3", "--format", "binary", "--out", "g2.bin",
        ],
    ];
    for args in setup {
        let st = Command::new(env!("CARGO_BIN_EXE_lacuna"))
            .current_dir(dir)
            .args(args)
            .status();
        ensure(st.map(|s| s.success()).unwrap_or(false), || {
            format!("setup {args:?} failed")
        })?;
    }
    let commands: Vec<&str> = vec![
        "check-sc --pres g2.pres --mu 1/6",
        "pieces --pres z3.pres",
        "eps-pieces --pres rels.pres --base z3.pres --oracle abelian --eps 1 --mu 1/2",
        "graded-check --schedule sched.json",
        "sparse-check --pres fam.pres",
        "dehn --pres g2.pres --word abABcdCDdcDC --trace",
        "ball --pres g2.pres --radius 3",
        "ball --pres z2.pres --radius 6 --oracle abelian --format binary",
        "dist --ball g2.bin --u abc --v CBA",
        "div --ball z2.json --nmax 4 --delta 1/3 --lambda 2",
        "div --ball z2.json --nmax 4 --delta 1/3 --lambda 2 --sample 300 --seed 9 --format csv",
        "delta --ball z2.json --thin --all-geodesics",
        "floyd --ball f2.json",
        "rips --ball z2.json --scan 3 --d 2 --full",
        "fill --ball z2.json --scan 3 --d 2 --loop 1,a,ab,b",
        "certify --ball f2.json --D 1 --R 4 --test-constants --all-centers",
        "gen aperiodic --length 10",
        "gen lacunary --count 3 --source thue-morse",
        "gen central --base ab,abAB --k 3,2",
        "gen gpc --p 3 --s 1 --c 1 --window 1",
        "gen gn --p 3 --c 1 --n 1 --N 1",
        "gen schedule --p 3 --phi 0,1,2,3 --delta 0,1,3,5 --r-max 3",
        "coset --pres z3.pres --max-cosets 100",
        "coset --pres g2.pres --max-cosets 200",
    ];
    let mut names = BTreeSet::new();
    for line in &commands {
        let args: Vec<String> = line.split_whitespace().map(String::from).collect();
        let first = lacuna_run(dir, &args, None, "1");
        let second = lacuna_run(dir, &args, None, "2");
        let single = lacuna_run(dir, &args, Some("1"), "3");
        ensure(matches!(first.code, Some(0 | 1 | 3)), || {
            format!("`{line}` exited with {:?}", first.code)
        })?;
        for other in [&second, &single] {
            ensure(
                first.code == other.code
                    && first.stdout == other.stdout
                    && first.stderr == other.stderr
                    && first.report == other.report,
                || format!("`{line}` is not reproducible"),
            )?;
        }
        ensure(!first.report.is_empty() || first.code == Some(3), || {
            format!("`{line}` wrote no report")
        })?;
        names.insert(if args[0] == "gen" {
            format!("gen {}", args[1])
        } else {
            args[0].clone()
        });
    }
    Ok(format!(
        "{} invocations over {} subcommands, byte-identical across runs and --threads 1",
        commands.len(),
        names.len()
    ))
}

fn main() {
    let criteria: [(u32, &str, Option<u64>, Check); 14] = [
        (1, "piece oracle equivalence", Some(1), c1_piece_oracle),
        (2, "genus-2 small cancellation", Some(1), c2_genus_two),
        (
            3,
            "hyperbolicity constant",
            Some(1),
            c3_hyperbolicity_constant,
        ),
        (4, "Dehn soundness", Some(60), c4_dehn_soundness),
        (5, "ball counts", Some(30), c5_ball_counts),
        (6, "tree delta", Some(60), c6_tree_delta),
        (7, "divergence baseline", Some(120), c7_divergence),
        (8, "Floyd bound", Some(60), c8_floyd),
        (9, "certificate constants", Some(10), c9_certificate),
        (10, "isoperimetric check", Some(60), c10_isoperimetric),
        (11, "aperiodic counts", Some(5), c11_aperiodic),
        (12, "schedule arithmetic", Some(1), c12_schedule),
        (13, "injectivity radius", Some(120), c13_injectivity),
        (14, "determinism", None, c14_determinism),
    ];
    let mut failed = 0;
    for (n, name, limit, check) in criteria {
        let t = Instant::now();
        let result =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let took = t.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if took > Duration::from_secs(l) => {
                Err(format!("over the {l} s limit"))
            }
            (r, _) => r,
        };
        let budget = limit.map(|l| format!(" / {l} s")).unwrap_or_default();
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "[{tag}] {n:>2} {name} ({:.3} s{budget}): {detail}",
            took.as_secs_f64()
        );
        failed += result.is_err() as u32;
    }
    println!("acceptance: {} of 14 criteria passed", 14 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
