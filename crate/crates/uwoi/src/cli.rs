//! The `uwoi` command line: one subcommand per table, JSON on stdout or in
//! `--output`, exit status 0 exactly when every check of the run passes.
//!
//! Output is deterministic. Object keys are sorted, randomized suites take
//! an explicit seed and rationals are printed as `a/b` strings.

use crate::error::{Error, Result};
use crate::gmfam::adjacent_in;
use crate::linalg::{fmt_q, QMatrix, Q};
use crate::localfield::{conjugator_from_x, r_family, solve_in_n, LogVec, Place};
use crate::orbital::{
    arthur_j, development, gl2_closed_form, global_weighted_t, j_numeric_padic, j_rectangular, sizes_inside,
    weight_at_g, weight_exact, weight_family,
};
use crate::orbits::{NilpotentOrbit, Partition};
use crate::richardson::OrbitData;
use crate::roots::{coroot_vector, levis_containing, to_f64_vec, Levi, Parabolic};
use crate::verify;
use crate::zeta::{c_constant, c_expr, verify_volume_identity, vol_levi, ZetaBackend};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

/// Version tag of the JSON layout.
pub const SCHEMA: &str = "uwoi-report/1";

#[derive(Parser, Debug)]
#[command(name = "uwoi", version, about = "Unipotent weighted orbital integrals for GL(n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Nilpotent orbits of GL(n) with invariants and Richardson Levis.
    Orbits {
        #[arg(long)]
        n: usize,
    },
    /// The ε-parametrization of the Richardson parabolics of an orbit.
    Richardson {
        #[arg(long)]
        partition: String,
    },
    /// The family (R_P(g))_P at one place, its checks and weights.
    Weights {
        /// Rows separated by `;`, entries by `,`; rationals as `a/b`.
        #[arg(long)]
        g: String,
        /// `pQ` for the Q-adic place, or `inf`.
        #[arg(long)]
        place: String,
        #[arg(long)]
        partition: String,
    },
    /// Polytope oracles for random positive (G,M)-families.
    GmCheck {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Closed-form local integrals of a rectangular orbit and their lattice-sum oracle.
    LocalJ {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        place: String,
        /// Total valuation summed exactly by the oracle.
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Global coefficients a^L(S, 𝔬) and the development of a simple orbit.
    Coefficients {
        #[arg(long)]
        partition: String,
        /// Places of S, comma separated, for example `inf,2`.
        #[arg(long = "S", value_delimiter = ',')]
        s: Vec<String>,
        /// Largest prime kept in the Euler-product cross-check.
        #[arg(long, default_value_t = 10000)]
        cutoff: u64,
        /// Also evaluate the global weighted integral at this T (comma separated rationals).
        #[arg(long = "T", value_delimiter = ',')]
        t: Option<Vec<String>>,
    },
    /// Round trip of the conjugator into N on random unipotent conjugates of X.
    SolveConjugator {
        /// A single orbit; default is every orbit of GL(k) for k ≤ n.
        #[arg(long)]
        partition: Option<String>,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Solve for this Y instead (requires --partition).
        #[arg(long)]
        y: Option<String>,
    },
}

/// Named pass/fail results collected during a run.
#[derive(Default)]
struct Checks(Vec<(String, bool)>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, pass: bool) {
        self.0.push((name.into(), pass));
    }

    fn all_pass(&self) -> bool {
        self.0.iter().all(|c| c.1)
    }
}

/// A finished run: the JSON document and the exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub json: Value,
}

impl Outcome {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn ones(l: &Levi) -> Vec<Vec<usize>> {
    l.blocks().iter().map(|b| b.iter().map(|a| a + 1).collect()).collect()
}

fn logvec_json(v: &LogVec) -> Value {
    match v {
        LogVec::Padic { prime, coef } => json!({
            "unit": format!("log {prime}"),
            "exact": coef.iter().map(fmt_q).collect::<Vec<_>>(),
        }),
        LogVec::Float(x) => json!({ "unit": "1", "value": x }),
    }
}

fn backend_of(place: Place) -> ZetaBackend {
    match place {
        Place::Padic(p) => ZetaBackend::Padic(p),
        Place::Real => ZetaBackend::Real,
        Place::Complex => ZetaBackend::Complex,
    }
}

fn orbit_arg(s: &str) -> Result<NilpotentOrbit> {
    Ok(NilpotentOrbit::new(Partition::parse(s)?))
}

/// Parses the arguments and runs the command. Usage errors come back as
/// the clap error so the binary can print help text unchanged.
pub fn run_args<I, T>(args: I) -> std::result::Result<(Outcome, Option<PathBuf>), clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    Ok((run(&cli.command), cli.output))
}

/// Runs one command. Library errors become a report with `ok = false`,
/// an `error` object and exit status 2.
pub fn run(cmd: &Command) -> Outcome {
    let name = match cmd {
        Command::Orbits { .. } => "orbits",
        Command::Richardson { .. } => "richardson",
        Command::Weights { .. } => "weights",
        Command::GmCheck { .. } => "gm-check",
        Command::LocalJ { .. } => "local-j",
        Command::Coefficients { .. } => "coefficients",
        Command::SolveConjugator { .. } => "solve-conjugator",
    };
    let mut checks = Checks::default();
    let result = match cmd {
        Command::Orbits { n } => orbits(*n, &mut checks),
        Command::Richardson { partition } => richardson(partition, &mut checks),
        Command::Weights { g, place, partition } => weights(g, place, partition, &mut checks),
        Command::GmCheck { n, trials, seed } => gm_check(*n, *trials, *seed, &mut checks),
        Command::LocalJ { r, d, place, depth } => local_j(*r, *d, place, *depth, &mut checks),
        Command::Coefficients { partition, s, cutoff, t } => coefficients(partition, s, *cutoff, t.as_deref(), &mut checks),
        Command::SolveConjugator { partition, n, trials, seed, y } => {
            solve_conjugator(partition.as_deref(), *n, *trials, *seed, y.as_deref(), &mut checks)
        }
    };
    let check_list: Vec<Value> = checks.0.iter().map(|(n, p)| json!({ "name": n, "pass": p })).collect();
    let failures: Vec<&String> = checks.0.iter().filter(|c| !c.1).map(|c| &c.0).collect();
    match result {
        Ok(data) => {
            let ok = checks.all_pass();
            Outcome {
                code: if ok { 0 } else { 1 },
                json: json!({
                    "schema": SCHEMA,
                    "command": name,
                    "config": config_json(cmd),
                    "result": data,
                    "checks": check_list,
                    "failures": failures,
                    "ok": ok,
                }),
            }
        }
        Err(e) => Outcome {
            code: 2,
            json: json!({
                "schema": SCHEMA,
                "command": name,
                "config": config_json(cmd),
                "error": { "code": e.code(), "message": e.to_string() },
                "checks": check_list,
                "failures": failures,
                "ok": false,
            }),
        },
    }
}

fn config_json(cmd: &Command) -> Value {
    match cmd {
        Command::Orbits { n } => json!({ "n": n }),
        Command::Richardson { partition } => json!({ "partition": partition }),
        Command::Weights { g, place, partition } => json!({ "g": g, "place": place, "partition": partition }),
        Command::GmCheck { n, trials, seed } => json!({ "n": n, "trials": trials, "seed": seed }),
        Command::LocalJ { r, d, place, depth } => json!({ "r": r, "d": d, "place": place, "depth": depth }),
        Command::Coefficients { partition, s, cutoff, t } => json!({ "partition": partition, "S": s, "cutoff": cutoff, "T": t }),
        Command::SolveConjugator { partition, n, trials, seed, y } => {
            json!({ "partition": partition, "n": n, "trials": trials, "seed": seed, "y": y })
        }
    }
}

fn orbits(n: usize, checks: &mut Checks) -> Result<Value> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let mut rows = Vec::new();
    let mut counts_ok = true;
    let mut identity_ok = true;
    for p in Partition::all(n) {
        let o = NilpotentOrbit::new(p);
        let data = OrbitData::new(&o)?;
        let formula = crate::richardson::epsilon_count_formula(&o);
        counts_ok &= data.richardson.len() as u128 == formula;
        let vi = verify_volume_identity(&o);
        identity_ok &= vi.holds && (!o.is_simple() || vi.holds_strict);
        rows.push(json!({
            "partition": o.partition.parts(),
            "inv": o.inv(),
            "simple": o.is_simple(),
            "richardson_levi": o.levi_sizes(),
            "richardson_count": data.richardson.len(),
            "count_formula": formula.to_string(),
            "weyl_quotient": crate::roots::weyl_group_of_levi_order(&data.m).to_string(),
            "c_x": c_expr(&o).display(),
            "volume_identity": { "holds": vi.holds, "holds_strict": vi.holds_strict },
        }));
    }
    checks.add("richardson_count_formula", counts_ok);
    checks.add("volume_identity", identity_ok);
    Ok(json!({ "n": n, "orbits": rows }))
}

fn richardson(partition: &str, checks: &mut Checks) -> Result<Value> {
    let o = orbit_arg(partition)?;
    let data = OrbitData::new(&o)?;
    let flags: Vec<Value> = data
        .epsilons
        .iter()
        .zip(&data.richardson)
        .map(|(e, p)| json!({ "epsilon": { "support": e.support, "rows": e.rows }, "parabolic": p.to_one_based() }))
        .collect();
    let table: Vec<Value> = verify::richardson_table(&data)?
        .into_iter()
        .map(|(p, t, w)| json!({ "parabolic": p, "richardson_image": t, "w_p": w }))
        .collect();
    let count_ok = data.richardson.len() as u128 == crate::richardson::epsilon_count_formula(&o);
    checks.add("count_formula", count_ok);
    let bijection = if o.n() <= 7 {
        let b = verify::richardson_bijection(&o)?;
        checks.add("bruteforce_bijection", b.ok);
        to_value(&b)
    } else {
        Value::String("skipped: brute force is limited to n ≤ 7".into())
    };
    let fibers = verify::fiber_law(&o)?;
    checks.add("fiber_law", fibers.ok);
    Ok(json!({
        "partition": o.partition.parts(),
        "kernel_flag": data.p0.to_one_based(),
        "levi": ones(&data.m),
        "flags": flags,
        "richardson_map": table,
        "bijection": bijection,
        "fibers": to_value(&fibers),
    }))
}

/// Float check that adjacent members differ along the separating coroot.
fn float_orthogonality(data: &OrbitData, fam: &[LogVec]) -> (bool, f64) {
    let mut worst = 0.0f64;
    for (i, j, s) in adjacent_in(&data.pm) {
        let b = data.pm[i].blocks();
        let line = to_f64_vec(&coroot_vector(data.n(), &b[s], &b[s + 1]));
        let (x, y) = (fam[i].to_f64(), fam[j].to_f64());
        let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let ll: f64 = line.iter().map(|v| v * v).sum();
        let c: f64 = d.iter().zip(&line).map(|(a, b)| a * b).sum::<f64>() / ll;
        let off: f64 = d.iter().zip(&line).map(|(a, b)| (a - c * b).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(off);
    }
    (worst <= 1e-9, worst)
}

fn weights(g: &str, place: &str, partition: &str, checks: &mut Checks) -> Result<Value> {
    let o = orbit_arg(partition)?;
    let data = OrbitData::new(&o)?;
    let g = QMatrix::parse(g)?;
    if g.rows() != data.n() || !g.is_square() {
        return Err(Error::SizeMismatch(format!("g must be {n}×{n}", n = data.n())));
    }
    if g.det() == Q::from_integer(0.into()) {
        return Err(Error::Singular);
    }
    let v = Place::parse(place)?;
    let y = g.inverse()?.mul(&data.x).mul(&g);
    let fam = r_family(&data, &g, v)?;
    let family: Vec<Value> = data
        .pm
        .iter()
        .zip(&fam)
        .map(|(p, f)| json!({ "parabolic": p.to_one_based(), "minus_r": logvec_json(f) }))
        .collect();
    let orthogonality = match v {
        Place::Padic(_) => {
            let rep = weight_family(&data, &g, v)?.check();
            checks.add("orthogonal", rep.orthogonal);
            json!({
                "exact": true,
                "orthogonal": rep.orthogonal,
                "positive": rep.positive,
                "coefficients": rep.coefficients.iter().map(|c| c.as_ref().map(fmt_q)).collect::<Vec<_>>(),
            })
        }
        _ => {
            let (ok, worst) = float_orthogonality(&data, &fam);
            checks.add("orthogonal", ok);
            json!({ "exact": false, "orthogonal": ok, "max_deviation": worst })
        }
    };
    let whole = Parabolic::whole(data.n());
    let mut values = Vec::new();
    for l in levis_containing(&data.m) {
        let value = weight_at_g(&data, &g, &l, &whole, v)?;
        let exact = match v {
            Place::Padic(p) => {
                let e = weight_exact(&data, &g, &l, &whole, p)?;
                json!({ "ratio": fmt_q(&e.ratio), "covolume_sq": fmt_q(&e.covolume_sq), "log_power": e.degree })
            }
            _ => Value::Null,
        };
        values.push(json!({ "levi": ones(&l), "parabolic": whole.to_one_based(), "value": value, "exact": exact }));
    }
    let identities = match v {
        Place::Padic(p) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
            let rep = verify::weight_identities(&data, &g, p, &mut rng)?;
            checks.add("adjacent_jump", rep.adjacent_jump);
            checks.add("centralizer_invariance", rep.centralizer);
            checks.add("weyl_equivariance", rep.weyl);
            to_value(&rep)
        }
        _ => Value::Null,
    };
    Ok(json!({
        "partition": o.partition.parts(),
        "place": v.to_string(),
        "y": y.to_strings(),
        "family": family,
        "orthogonality": orthogonality,
        "weights": values,
        "identities": identities,
    }))
}

fn gm_check(n: usize, trials: usize, seed: u64, checks: &mut Checks) -> Result<Value> {
    let s = verify::gm_suite(n, trials, seed)?;
    checks.add("volume_equals_hull", s.failed.iter().all(|t| t.volume_rel_err <= 1e-8));
    checks.add("indicator_equals_alternating_sum", s.failed.iter().all(|t| t.indicator_ok));
    checks.add("splitting_identity", s.failed.iter().all(|t| t.splitting_rel_err <= 1e-8));
    checks.add("trials_run", s.trials > 0);
    Ok(to_value(&s))
}

/// One representative of each class of Levis containing `M` under
/// reordering of the blocks.
fn levi_classes(m: &Levi) -> Result<Vec<Levi>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for l in levis_containing(m) {
        let mut key = sizes_inside(m, &l)?;
        for k in key.iter_mut() {
            k.sort_unstable();
        }
        key.sort();
        if seen.insert(key) {
            out.push(l);
        }
    }
    Ok(out)
}

fn local_j(r: usize, d: usize, place: &str, depth: usize, checks: &mut Checks) -> Result<Value> {
    let v = Place::parse(place)?;
    let backend = backend_of(v);
    let o = NilpotentOrbit::new(Partition::new(vec![r; d]));
    let data = OrbitData::new(&o)?;
    let n = o.n();
    let whole = Parabolic::whole(n);
    let c_x = c_constant(&o, &backend).map(|c| json!({ "expr": c.expr.display(), "value": c.value })).unwrap_or(Value::Null);
    let mut rows = Vec::new();
    for l in levi_classes(&data.m)? {
        let value = j_rectangular(r, d, &l, &backend)?;
        let a = arthur_j(&o, &l, &backend)?;
        let w_ok = a.spread <= 1e-9 * (1.0 + value.abs());
        checks.add(format!("w_independent L={:?}", ones(&l)), w_ok);
        let numeric = match v {
            Place::Padic(p) if d <= 2 => {
                let num = j_numeric_padic(&o, &l, &whole, p, depth)?;
                let residual = (num.estimate - value).abs();
                let rel = if value == 0.0 { residual } else { residual / value.abs() };
                let pass = residual <= num.tail_bound + 1e-12 && rel <= 1e-2 && num.polynomial_verified && num.representatives_agree;
                checks.add(format!("oracle L={:?}", ones(&l)), pass);
                json!({ "integral": to_value(&num), "residual": residual, "relative_residual": rel })
            }
            _ => Value::Null,
        };
        if l.rank() == 1 {
            checks.add("whole_group_is_one", (value - 1.0).abs() < 1e-12);
        }
        rows.push(json!({
            "levi": ones(&l),
            "value": value,
            "backend": to_value(&backend),
            "arthur": to_value(&a),
            "numeric": numeric,
        }));
    }
    let gl2 = match (r, d, v) {
        (2, 1, Place::Padic(p)) => {
            let closed = gl2_closed_form(p);
            let value = j_rectangular(2, 1, &Levi::torus(2), &backend)?;
            let pass = (value.abs() - closed).abs() < 1e-12;
            checks.add("gl2_closed_form", pass);
            json!({ "closed_form": closed, "value": value, "difference": (value.abs() - closed).abs() })
        }
        _ => Value::Null,
    };
    Ok(json!({ "orbit": o.partition.parts(), "place": v.to_string(), "c_x": c_x, "levis": rows, "gl2": gl2 }))
}

fn coefficients(partition: &str, s: &[String], cutoff: u64, t: Option<&[String]>, checks: &mut Checks) -> Result<Value> {
    let o = orbit_arg(partition)?;
    let places: Vec<Place> = s.iter().map(|x| Place::parse(x)).collect::<Result<_>>()?;
    let data = OrbitData::new(&o)?;
    let terms = development(&o, &places, cutoff)?;
    checks.add("term_count", terms.len() == levis_containing(&data.m).len());
    let vol_m = vol_levi(&data.m.block_sizes())?;
    let mut skipped = Vec::new();
    for term in &terms {
        let label = format!("L={:?}", term.levi);
        match &term.coefficient {
            Some(c) => {
                checks.add(format!("l1_independent {label}"), c.l1_spread <= 1e-8);
                checks.add(format!("majorized {label}"), c.value.abs() <= c.bound * (1.0 + 1e-12));
                if let Some(e) = &c.euler {
                    checks.add(format!("euler_product {label}"), (e.value - c.value).abs() <= e.tail_bound);
                }
                if term.levi == ones(&data.m) {
                    checks.add("levi_term_is_volume", c.value == vol_m);
                }
            }
            None => skipped.push(json!({ "levi": term.levi, "reason": term.note })),
        }
    }
    let global_t = match t {
        Some(ts) => {
            let tq: Vec<Q> = ts.iter().map(|x| crate::linalg::parse_q(x)).collect::<Result<_>>()?;
            let gw = global_weighted_t(&o, &data.m, &Parabolic::whole(o.n()), &tq)?;
            checks.add("t_degree_bound", gw.degree <= data.m.dim_a_g());
            to_value(&gw)
        }
        None => Value::Null,
    };
    Ok(json!({
        "orbit": o.partition.parts(),
        "S": places.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "vol_levi_m": vol_m,
        "terms": to_value(&terms),
        "skipped": skipped,
        "global_weighted_t": global_t,
    }))
}

fn solve_conjugator(
    partition: Option<&str>,
    n: usize,
    trials: usize,
    seed: u64,
    y: Option<&str>,
    checks: &mut Checks,
) -> Result<Value> {
    if let Some(ys) = y {
        let o = orbit_arg(partition.ok_or_else(|| Error::InvalidInput("--y needs --partition".into()))?)?;
        let data = OrbitData::new(&o)?;
        let ym = QMatrix::parse(ys)?;
        let sol = solve_in_n(&data, &ym)?;
        let ok = sol.inverse()?.mul(&data.x).mul(&sol) == ym;
        checks.add("roundtrip", ok);
        let g = conjugator_from_x(&data, &ym)?;
        return Ok(json!({ "orbit": o.partition.parts(), "n": sol.to_strings(), "conjugator": g.to_strings() }));
    }
    let orbits: Vec<NilpotentOrbit> = match partition {
        Some(p) => vec![orbit_arg(p)?],
        None => (1..=n).flat_map(Partition::all).map(NilpotentOrbit::new).collect(),
    };
    let mut reports = Vec::new();
    for (i, o) in orbits.iter().enumerate() {
        let rep = verify::solve_suite(o, trials, seed.wrapping_add(i as u64))?;
        checks.add(format!("solve {:?}", rep.partition), rep.ok);
        reports.push(to_value(&rep));
    }
    Ok(json!({ "trials_per_orbit": trials, "orbits": reports }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        let mut full = vec!["uwoi"];
        full.extend_from_slice(args);
        run_args(full).unwrap().0
    }

    #[test]
    fn orbits_of_three() {
        let out = go(&["orbits", "--n", "3"]);
        assert_eq!(out.code, 0);
        let rows = out.json["result"]["orbits"].as_array().unwrap();
        assert_eq!(rows.len(), 3);
        let simple: Vec<bool> = rows.iter().filter(|r| r["partition"] == json!([2, 1])).map(|r| r["simple"].as_bool().unwrap()).collect();
        assert_eq!(simple, vec![true]);
    }

    #[test]
    fn bad_input_is_reported() {
        let out = go(&["richardson", "--partition", "2,x"]);
        assert_eq!(out.code, 2);
        assert_eq!(out.json["error"]["code"], "invalid_input");
        assert!(run_args(["uwoi", "orbits"]).is_err());
    }

    #[test]
    fn deterministic_output() {
        let a = go(&["gm-check", "--n", "3", "--trials", "5", "--seed", "4"]);
        let b = go(&["gm-check", "--n", "3", "--trials", "5", "--seed", "4"]);
        assert_eq!(a.render(), b.render());
        assert_eq!(a.code, 0);
    }

    #[test]
    fn weights_at_a_padic_place() {
        let out = go(&["weights", "--g", "1,0,0;0,4/3,0;1,0,2", "--place", "p2", "--partition", "2,1"]);
        assert_eq!(out.code, 0, "{}", out.render());
        let out = go(&["weights", "--g", "1,1,0;0,2,0;1,0,3", "--place", "inf", "--partition", "2,1"]);
        assert_eq!(out.code, 0, "{}", out.render());
    }
}
