use std::path::Path;

use lacuna::cancellation::{
    check_classical, check_graded_schedule, enumerate_pieces, find_eps_pieces, CancellationError,
    GradedSchedule,
};
use lacuna::cayley::{
    build_ball_with, AbelianOracle, Ball, BallBudget, CayleyError, CosetOracle, EqualityOracle,
    FreeOracle,
};
use lacuna::certifier::{
    certify, check_isoperimetric, Centers, CertificateConstants, CertifierError, FillOptions,
    RipsComplex,
};
use lacuna::dehn::{DehnError, DehnOracle, DehnSolver};
use lacuna::presentation::{
    coset_enumerate, enumerate_cosets, length_spectrum, sparseness_witness, CosetOutcome,
};
use lacuna::probes::{
    divergence, divergence_profile, gromov_delta_4pt_within, thin_triangle_delta_within,
    FloydMetric, GeodesicChoice, ProbeError, ScanMode,
};
use lacuna::rational::{int, parse_rational, ratio};
use lacuna::zoo::{self, ZooError};
use lacuna::{symmetrize, Presentation, Rational, Word};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::{Failure, Outcome};

type Res<T> = Result<T, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

impl From<CayleyError> for Failure {
    fn from(e: CayleyError) -> Self {
        match e {
            CayleyError::OracleBudgetExceeded { .. } | CayleyError::MemoryBudgetExceeded { .. } => {
                Failure::Budget(e.to_string())
            }
            e => usage(e),
        }
    }
}

impl From<ProbeError> for Failure {
    fn from(e: ProbeError) -> Self {
        match e {
            ProbeError::Cayley(c) => c.into(),
            ProbeError::BudgetExceeded(_) | ProbeError::FloydOverflow(_) => {
                Failure::Budget(e.to_string())
            }
            e => usage(e),
        }
    }
}

impl From<CertifierError> for Failure {
    fn from(e: CertifierError) -> Self {
        match e {
            CertifierError::Probe(p) => p.into(),
            CertifierError::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            e => usage(e),
        }
    }
}

impl From<CancellationError> for Failure {
    fn from(e: CancellationError) -> Self {
        match e {
            CancellationError::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            e => usage(e),
        }
    }
}

impl From<ZooError> for Failure {
    fn from(e: ZooError) -> Self {
        match e {
            ZooError::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            e => usage(e),
        }
    }
}

impl From<DehnError> for Failure {
    fn from(e: DehnError) -> Self {
        usage(e)
    }
}

/// JSON report with the tool version and the configuration echo.
fn report(cmd: &Command, result: impl Serialize, failed: bool) -> Res<Outcome> {
    let value = json!({
        "tool": "lacuna",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cmd,
        "result": result,
    });
    let mut body = serde_json::to_vec_pretty(&value).map_err(usage)?;
    body.push(b'\n');
    Ok(Outcome { body, failed })
}

fn rational(s: &str, what: &str) -> Res<Rational> {
    parse_rational(s).map_err(|e| Failure::Usage(format!("--{what}: {e}")))
}

fn word(s: &str) -> Res<Word> {
    let s = s.trim();
    if s.is_empty() || s == "1" {
        return Ok(Word::empty());
    }
    Word::parse(s).map_err(|e| Failure::Usage(format!("bad word {s:?}: {e}")))
}

fn list<T>(s: &str, parse: impl Fn(&str) -> Res<T>) -> Res<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse)
        .collect()
}

fn integer<T: std::str::FromStr>(s: &str) -> Res<T> {
    s.parse()
        .map_err(|_| Failure::Usage(format!("bad integer {s:?}")))
}

fn read_text(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_pres(path: &Path) -> Res<Presentation> {
    Presentation::parse(&read_text(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_ball(path: &Path) -> Res<Ball> {
    let bytes =
        std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if bytes.starts_with(b"LCNB") {
        Ok(Ball::read_binary(&bytes[..])?)
    } else {
        let text = String::from_utf8(bytes).map_err(usage)?;
        Ok(Ball::from_json(&text)?)
    }
}

fn vertex(ball: &Ball, s: &str) -> Res<u32> {
    Ok(ball.locate(&word(s)?)?)
}

/// An equality oracle for the group presented by `p`.
fn oracle(p: &Presentation, args: &OracleArgs) -> Res<Box<dyn EqualityOracle>> {
    Ok(match args.oracle {
        OracleKind::Dehn => Box::new(DehnOracle::new(
            p,
            &rational(&args.oracle_mu, "oracle-mu")?,
        )?),
        OracleKind::Free => {
            if !p.relators().is_empty() {
                return Err(usage(
                    "the free oracle needs a presentation without relators",
                ));
            }
            Box::new(FreeOracle::new(p.alphabet.clone()))
        }
        OracleKind::Abelian => {
            let gens: Vec<Word> = p.alphabet.generators().map(Word::letter).collect();
            let mut comms = Vec::new();
            for i in 0..gens.len() {
                for j in i + 1..gens.len() {
                    comms.push(Word::commutator(&gens[i], &gens[j]));
                }
            }
            let standard = symmetrize(&comms).map_err(usage)?;
            let given = p.symmetrized();
            let mut a: Vec<&Word> = standard.words().collect();
            let mut b: Vec<&Word> = given.words().collect();
            a.sort();
            b.sort();
            if a != b {
                return Err(usage(
                    "the abelian oracle needs exactly the commutator relators of the alphabet",
                ));
            }
            Box::new(AbelianOracle::new(p.alphabet.clone()))
        }
        OracleKind::Coset => {
            let table = enumerate_cosets(p, &[], args.max_cosets).ok_or_else(|| {
                Failure::Budget(format!(
                    "coset enumeration exceeded {} cosets",
                    args.max_cosets
                ))
            })?;
            Box::new(CosetOracle::new(table))
        }
    })
}

pub fn dispatch(cmd: &Command) -> Res<Outcome> {
    match cmd {
        Command::CheckSc(a) => check_sc(cmd, a),
        Command::Pieces(a) => {
            let p = read_pres(&a.pres)?;
            report(cmd, enumerate_pieces(&p.symmetrized())?, false)
        }
        Command::EpsPieces(a) => {
            let p = read_pres(&a.pres)?;
            let base = read_pres(&a.base)?;
            if base.alphabet != p.alphabet {
                return Err(usage("base presentation must use the same alphabet"));
            }
            let o = oracle(&base, &a.oracle)?;
            let mu = rational(&a.mu, "mu")?;
            let rep = find_eps_pieces(&p.symmetrized(), a.eps, &mu, o.as_ref(), a.max_calls)?;
            let failed = rep.violation;
            report(cmd, rep, failed)
        }
        Command::GradedCheck(a) => {
            let g: GradedSchedule =
                serde_json::from_str(&read_text(&a.schedule)?).map_err(usage)?;
            let v = check_graded_schedule(&g);
            let failed = !v.ok;
            report(cmd, v, failed)
        }
        Command::SparseCheck(a) => sparse_check(cmd, a),
        Command::Dehn(a) => dehn(cmd, a),
        Command::Ball(a) => ball(cmd, a),
        Command::Dist(a) => {
            let b = load_ball(&a.ball)?;
            let (u, v) = (vertex(&b, &a.u)?, vertex(&b, &a.v)?);
            report(cmd, b.dist(u, v)?, false)
        }
        Command::Div(a) => div(cmd, a),
        Command::Delta(a) => delta(cmd, a),
        Command::Floyd(a) => floyd(cmd, a),
        Command::Rips(a) => {
            let b = load_ball(&a.ball)?;
            let rc = RipsComplex::from_ball(&b, a.scan, &rational(&a.d, "d")?)?;
            let mut out = json!({
                "d": lacuna::rational::format_rational(rc.d()),
                "vertices": rc.len(),
                "edges": rc.edges().len(),
                "triangles": rc.triangles().len(),
            });
            if a.full {
                out["complex"] = serde_json::to_value(rc.summary()).map_err(usage)?;
            }
            report(cmd, out, false)
        }
        Command::Fill(a) => fill(cmd, a),
        Command::Certify(a) => {
            let b = load_ball(&a.ball)?;
            let constants = if a.test_constants {
                CertificateConstants::test()
            } else {
                CertificateConstants::standard()
            };
            let centers = if a.all_centers {
                Centers::All
            } else {
                Centers::Identity
            };
            let cert = certify(&b, a.d, a.r, &constants, centers)?;
            let failed = cert.verdict == lacuna::certifier::Verdict::Fail;
            report(cmd, cert, failed)
        }
        Command::Gen(g) => gen(cmd, g),
        Command::Coset(a) => {
            let p = read_pres(&a.pres)?;
            let sub = list(&a.subgroup, word)?;
            let out = coset_enumerate(&p, &sub, a.max_cosets);
            if let CosetOutcome::Inconclusive { cosets_defined } = out {
                return Err(Failure::Budget(format!(
                    "coset table did not close after {cosets_defined} cosets"
                )));
            }
            report(cmd, out, false)
        }
    }
}

fn check_sc(cmd: &Command, a: &CheckSc) -> Res<Outcome> {
    let p = read_pres(&a.pres)?;
    let mu = rational(&a.mu, "mu")?;
    let overall = check_classical(&p.symmetrized(), &mu);
    let tiers: Vec<Value> = if p.tiers().is_some() {
        p.tier_groups()
            .keys()
            .map(|&k| {
                let v = check_classical(&p.up_to_tier(k).symmetrized(), &mu);
                json!({ "up_to_tier": k, "verdict": v })
            })
            .collect()
    } else {
        Vec::new()
    };
    let failed = !overall.ok;
    report(
        cmd,
        json!({ "ok": overall.ok, "overall": overall, "tiers": tiers }),
        failed,
    )
}

fn sparse_check(cmd: &Command, a: &SparseCheck) -> Res<Outcome> {
    let p = read_pres(&a.pres)?;
    let floor = rational(&a.lambda_floor, "lambda-floor")?;
    if floor <= int(0) || floor >= int(1) {
        return Err(usage("--lambda-floor must lie strictly between 0 and 1"));
    }
    let spectrum = length_spectrum(&p).lengths().to_vec();
    let lo = a.lo.unwrap_or(1);
    let hi =
        a.hi.unwrap_or_else(|| spectrum.last().copied().unwrap_or(1));
    let mut rows = Vec::new();
    let mut all = true;
    let mut lambda = ratio(1, 2);
    while lambda >= floor {
        let w = sparseness_witness(&spectrum, &lambda, lo, hi).map_err(usage)?;
        all &= w.is_some();
        rows.push(json!({ "lambda": lacuna::rational::format_rational(&lambda), "witness": w }));
        lambda = lambda * ratio(1, 2);
    }
    report(
        cmd,
        json!({ "spectrum": spectrum, "window": [lo, hi], "all_witnessed": all, "sweep": rows }),
        !all,
    )
}

fn dehn(cmd: &Command, a: &Dehn) -> Res<Outcome> {
    let p = read_pres(&a.pres)?;
    let w = word(&a.word)?;
    p.alphabet.check_word(&w).map_err(usage)?;
    let solver = DehnSolver::for_presentation(&p, &rational(&a.mu, "mu")?)?;
    let trace = solver.reduce(&w);
    if a.trace {
        eprintln!("input  {}", display(&trace.input));
        for (k, s) in trace.steps.iter().enumerate() {
            eprintln!(
                "step {:>3}  at {:>4}  relator {:>3}  replace {} letters by {}  -> {}",
                k + 1,
                s.position,
                s.relator,
                s.replaced_len,
                s.replacement_len,
                display(&s.result)
            );
        }
        eprintln!("final  {}", display(&trace.final_word));
    }
    let trivial = trace.is_trivial();
    report(cmd, json!({ "trivial": trivial, "trace": trace }), false)
}

fn display(w: &Word) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.to_string()
    }
}

fn ball(cmd: &Command, a: &BallCmd) -> Res<Outcome> {
    let p = read_pres(&a.pres)?;
    let o = oracle(&p, &a.oracle)?;
    let budget = BallBudget {
        max_vertices: a.max_vertices,
        max_oracle_calls: a.max_oracle_calls.unwrap_or(u64::MAX),
    };
    let b = build_ball_with(o.as_ref(), a.radius, budget)?;
    let body = match a.format {
        BallFormat::Json => {
            let mut v: Value = serde_json::from_str(&b.to_json()).map_err(usage)?;
            v["tool"] = json!("lacuna");
            v["version"] = json!(env!("CARGO_PKG_VERSION"));
            v["config"] = serde_json::to_value(cmd).map_err(usage)?;
            let mut body = serde_json::to_vec_pretty(&v).map_err(usage)?;
            body.push(b'\n');
            body
        }
        BallFormat::Binary => {
            let mut body = Vec::new();
            b.write_binary(&mut body)?;
            body
        }
    };
    Ok(Outcome {
        body,
        failed: false,
    })
}

fn div(cmd: &Command, a: &Div) -> Res<Outcome> {
    let b = load_ball(&a.ball)?;
    let delta = rational(&a.delta, "delta")?;
    let lambda = rational(&a.lambda, "lambda")?;
    if delta <= int(0) {
        return Err(usage("--delta must be positive"));
    }
    if let Some(t) = &a.triple {
        let (x, y, z) = (vertex(&b, &t[0])?, vertex(&b, &t[1])?, vertex(&b, &t[2])?);
        let v = divergence(&b, x, y, z, &delta, &lambda)?;
        return report(cmd, json!({ "value": v }), false);
    }
    let mode = match a.sample {
        Some(count) => ScanMode::Sampled {
            seed: a.seed,
            count,
        },
        None => ScanMode::Exhaustive,
    };
    let profile = divergence_profile(&b, a.nmax, &delta, &lambda, &mode)?;
    match a.format {
        ReportFormat::Json => report(cmd, profile, false),
        ReportFormat::Csv => Ok(Outcome {
            body: profile.to_csv().into_bytes(),
            failed: false,
        }),
    }
}

fn delta(cmd: &Command, a: &Delta) -> Res<Outcome> {
    let b = load_ball(&a.ball)?;
    let p = vertex(&b, &a.basepoint)?;
    let scan = a.scan.unwrap_or(b.radius() / 2);
    let gromov = gromov_delta_4pt_within(&b, p, scan)?;
    let mut out = json!({
        "gromov_delta": lacuna::rational::format_rational(&gromov),
        "scan_radius": scan,
        "basepoint": display(b.word(p)),
    });
    if a.thin {
        let choice = if a.all_geodesics {
            GeodesicChoice::All {
                per_side: a.per_side,
                budget: a.budget,
            }
        } else {
            GeodesicChoice::Canonical
        };
        let thin = thin_triangle_delta_within(&b, b.radius() / 4, choice)?;
        out["thin_triangle_delta"] = json!(lacuna::rational::format_rational(&thin));
        out["thin_scan_radius"] = json!(b.radius() / 4);
        // With canonical geodesics the value is a lower bound.
        out["thin_is_lower_bound"] = json!(!a.all_geodesics);
    }
    report(cmd, out, false)
}

fn floyd(cmd: &Command, a: &Floyd) -> Res<Outcome> {
    let b = load_ball(&a.ball)?;
    let f = FloydMetric::new(&b)?;
    let fmt = |s: u128| lacuna::rational::format_rational(&f.to_rational(s));
    match (&a.u, &a.v) {
        (Some(u), Some(v)) => {
            let (u, v) = (vertex(&b, u)?, vertex(&b, v)?);
            let d = f.distance(u, v)?;
            report(
                cmd,
                json!({ "distance": lacuna::rational::format_rational(&d) }),
                false,
            )
        }
        _ => {
            use rayon::prelude::*;
            let (best, u, v) = (0..b.len() as u32)
                .into_par_iter()
                .map(|u| {
                    let row = f.scaled_from(u);
                    let (v, d) = row
                        .iter()
                        .enumerate()
                        .max_by_key(|&(i, d)| (*d, std::cmp::Reverse(i)))
                        .map(|(i, d)| (i as u32, *d))
                        .unwrap_or((u, 0));
                    (d, u, v)
                })
                .reduce(
                    || (0, 0, 0),
                    |x, y| {
                        if (y.0, std::cmp::Reverse(y.1)) > (x.0, std::cmp::Reverse(x.1)) {
                            y
                        } else {
                            x
                        }
                    },
                );
            report(
                cmd,
                json!({
                    "max_distance": fmt(best),
                    "u": display(b.word(u)),
                    "v": display(b.word(v)),
                    "scale": f.scale().to_string(),
                }),
                false,
            )
        }
    }
}

fn fill(cmd: &Command, a: &Fill) -> Res<Outcome> {
    let b = load_ball(&a.ball)?;
    let rc = RipsComplex::from_ball(&b, a.scan, &rational(&a.d, "d")?)?;
    let cycle = list(&a.cycle, |s| {
        rc.index_of(&word(s)?.to_string())
            .ok_or_else(|| Failure::Usage(format!("{s} is not a vertex of the complex")))
    })?;
    let opts = FillOptions {
        max_cells: a.max_cells,
        max_states: a.max_states,
        slack: a.slack,
    };
    let check = check_isoperimetric(&rc, &cycle, &rational(&a.delta, "delta")?, &opts)?;
    let failed = !check.holds;
    report(cmd, check, failed)
}

fn emit_pres(cmd: &Command, p: &Presentation) -> Res<Outcome> {
    let mut p = p.clone();
    let config = serde_json::to_string(cmd).map_err(usage)?;
    p.notes.insert(
        0,
        format!("lacuna {} config: {config}", env!("CARGO_PKG_VERSION")),
    );
    Ok(Outcome {
        body: p.serialize().into_bytes(),
        failed: false,
    })
}

fn gen(cmd: &Command, g: &Gen) -> Res<Outcome> {
    match g {
        Gen::Aperiodic { length, power } => {
            if *length == 0 || *length > 24 {
                return Err(usage("--length must lie in 1..=24"));
            }
            let words = zoo::gen_aperiodic_words(*length, *power);
            let bound = zoo::meets_aperiodic_bound(*length as u32, words.len());
            report(
                cmd,
                json!({
                    "count": words.len(),
                    "meets_three_halves_bound": bound,
                    "words": words.iter().map(Word::to_string).collect::<Vec<_>>(),
                }),
                false,
            )
        }
        Gen::Lacunary {
            count,
            source,
            indices,
        } => {
            let idx = match indices {
                Some(s) => list(s, integer::<u64>)?,
                None => zoo::lacunary_indices(*count),
            };
            let lambdas: Vec<Rational> = (1..=6).map(|k| ratio(1, 1 << k)).collect();
            let (p, _) = match source {
                WordSource::Powers => zoo::gen_lacunary_family(
                    &zoo::alternating_powers,
                    "powers",
                    &idx,
                    *count,
                    &lambdas,
                    &ratio(1, 6),
                )?,
                WordSource::ThueMorse => zoo::gen_lacunary_family(
                    &|_, i| zoo::thue_morse(i),
                    "thue-morse",
                    &idx,
                    *count,
                    &lambdas,
                    &ratio(1, 6),
                )?,
            };
            emit_pres(cmd, &p)
        }
        Gen::Central { base, k } => {
            let base = list(base, word)?;
            let ks = list(k, integer::<u64>)?;
            if base.len() != ks.len() {
                return Err(usage("--base and --k need the same number of entries"));
            }
            emit_pres(cmd, &zoo::gen_central_extension(&base, &ks)?)
        }
        Gen::Gpc {
            p,
            s,
            c,
            window,
            budget,
        } => {
            let c = list(c, integer::<u32>)?;
            check_schedule(&c, *window)?;
            emit_pres(
                cmd,
                &zoo::gen_gpc_finite_quotient(*p, *s, &c, *window, *budget)?,
            )
        }
        Gen::Gn {
            p,
            c,
            n,
            big_n,
            budget,
        } => {
            let c = list(c, integer::<u32>)?;
            check_schedule(&c, *n)?;
            emit_pres(cmd, &zoo::gen_gn_truncation(*p, &c, *n, *big_n, *budget)?)
        }
        Gen::Schedule {
            p,
            n0,
            phi,
            delta,
            r_max,
            rows,
        } => {
            let phi = list(phi, |s| rational(s, "phi"))?;
            let delta = list(delta, |s| rational(s, "delta"))?;
            let sched = zoo::schedule_torsion_params(*p, *n0, &phi, &delta, *r_max)?;
            let table: Vec<Value> = sched
                .exponent_table(*rows)
                .into_iter()
                .map(|(i, regime, n)| json!({ "rank": i, "regime": regime, "n_a": n.to_string() }))
                .collect();
            report(cmd, json!({ "schedule": sched, "exponents": table }), false)
        }
    }
}

fn check_schedule(c: &[u32], window: usize) -> Res<()> {
    if c.len() < window {
        return Err(usage("--c needs an entry for every window"));
    }
    if c.windows(2).any(|w| w[0] > w[1]) || c.contains(&0) {
        return Err(usage("--c must be positive and nondecreasing"));
    }
    Ok(())
}
