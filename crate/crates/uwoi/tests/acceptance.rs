//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Built with `harness = false` so the lines are printed by `cargo test`
//! without `--nocapture`. The criteria run on separate threads.

use std::time::Instant;

use uwoi::localfield::Place;
use uwoi::orbital::{development, gl2_closed_form, j_numeric_padic, j_rectangular};
use uwoi::orbits::{NilpotentOrbit, Partition};
use uwoi::richardson::OrbitData;
use uwoi::roots::{levis_containing, Levi, Parabolic};
use uwoi::verify;
use uwoi::zeta::{c_constant, verify_volume_identity, vol_levi, z_jet, z_value, ZetaBackend};
use uwoi::Error;

type Outcome = Result<String, String>;
type Criterion = (u8, &'static str, fn() -> Outcome);

fn orbits_up_to(n: usize) -> impl Iterator<Item = NilpotentOrbit> {
    (1..=n).flat_map(Partition::all).map(NilpotentOrbit::new)
}

fn err(e: Error) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for o in orbits_up_to(7) {
        let r = verify::richardson_bijection(&o).map_err(err)?;
        if !r.ok {
            return Err(format!("{:?}: ε count {} formula {} brute force {}", r.partition, r.epsilon_count, r.formula, r.bruteforce));
        }
        count += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("{count} orbits agree but took {secs:.1} s"));
    }
    Ok(format!("{count} orbits with n ≤ 7 agree with brute force in {secs:.1} s"))
}

fn criterion_2() -> Outcome {
    let mut count = 0;
    for o in orbits_up_to(6) {
        let r = verify::fiber_law(&o).map_err(err)?;
        if !r.ok {
            return Err(format!("{:?}: fibers {:?}, expected {}", r.partition, r.fibers, r.expected));
        }
        if r.bijective != r.simple {
            return Err(format!("{:?}: bijective {} simple {}", r.partition, r.bijective, r.simple));
        }
        count += 1;
    }
    Ok(format!("{count} orbits with n ≤ 6"))
}

fn criterion_3() -> Outcome {
    let trials = 216;
    let s = verify::weight_suite(&[2, 3, 4], &[2, 3, 5], trials, 3).map_err(err)?;
    if !s.ok() {
        let first = &s.failed[0];
        return Err(format!("{} of {} failed, first {:?} at p = {}", s.failures, s.trials, first.partition, first.prime));
    }
    Ok(format!("{trials} random g over n ∈ {{2,3,4}}, q ∈ {{2,3,5}}: all four identities exact"))
}

fn criterion_4() -> Outcome {
    let mut total = 0;
    let mut worst = (0.0f64, 0.0f64);
    for n in 2..=5 {
        let s = verify::gm_suite(n, 130, 40 + n as u64).map_err(err)?;
        if !s.ok() {
            let t = &s.failed[0];
            return Err(format!(
                "n = {n}: {} failures, first M = {:?} volume err {:e} splitting err {:e} indicator {}",
                s.failures, t.levi, t.volume_rel_err, t.splitting_rel_err, t.indicator_ok
            ));
        }
        total += s.trials;
        worst = (worst.0.max(s.max_volume_rel_err), worst.1.max(s.max_splitting_rel_err));
    }
    Ok(format!("{total} families, max volume err {:.1e}, max splitting err {:.1e}", worst.0, worst.1))
}

fn finite_difference(backend: &ZetaBackend, d: usize, s0: f64) -> Result<(f64, f64), Error> {
    let h = 1e-4;
    let f = |s: f64| z_value(backend, d, s);
    let (fp, f0, fm) = (f(s0 + h)?, f(s0)?, f(s0 - h)?);
    Ok(((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)))
}

fn criterion_5() -> Outcome {
    let mut orbits = 0;
    for o in orbits_up_to(8) {
        let vi = verify_volume_identity(&o);
        if !vi.holds {
            return Err(format!("{:?}: volume identity {} ≠ {}", o.partition.parts(), vi.lhs.display(), vi.rhs.display()));
        }
        let diverges = matches!(c_constant(&o, &ZetaBackend::Global), Err(Error::Divergence(_)));
        if diverges == o.is_simple() {
            return Err(format!("{:?}: divergence {diverges} but simple {}", o.partition.parts(), o.is_simple()));
        }
        orbits += 1;
    }
    let backends = [
        ZetaBackend::Padic(2),
        ZetaBackend::Padic(5),
        ZetaBackend::Real,
        ZetaBackend::Complex,
        ZetaBackend::Global,
        ZetaBackend::Partial { finite: vec![2, 3] },
    ];
    let mut worst = 0.0f64;
    for b in &backends {
        for d in 1..=3 {
            for s0 in [3.5, 4.25, 6.0] {
                let jet = z_jet(b, d, s0, 1.0, 2).map_err(err)?;
                let (d1, d2) = finite_difference(b, d, s0).map_err(err)?;
                let scale = 1.0 + jet.coef[0].abs();
                let e = ((jet.coef[1] - d1).abs() / scale).max((2.0 * jet.coef[2] - d2).abs() / scale);
                worst = worst.max(e);
                if e > 1e-6 {
                    return Err(format!("{b:?} d = {d} s = {s0}: jet {:?} vs differences ({d1}, {d2})", jet.coef));
                }
            }
        }
    }
    Ok(format!("{orbits} orbits with n ≤ 8; jets match differences to {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut cells = 0;
    let mut worst_rel = 0.0f64;
    for (r, d) in [(2, 1), (3, 1), (2, 2)] {
        let o = NilpotentOrbit::new(Partition::new(vec![r; d]));
        let data = OrbitData::new(&o).map_err(err)?;
        let whole = Parabolic::whole(o.n());
        for q in [2u64, 3] {
            let backend = ZetaBackend::Padic(q);
            for l in levis_containing(&data.m) {
                let closed = j_rectangular(r, d, &l, &backend).map_err(err)?;
                let num = j_numeric_padic(&o, &l, &whole, q, 8).map_err(err)?;
                let residual = (num.estimate - closed).abs();
                let rel = residual / closed.abs().max(f64::MIN_POSITIVE);
                worst_rel = worst_rel.max(rel);
                if residual > num.tail_bound || rel > 1e-2 {
                    return Err(format!(
                        "(r,d) = ({r},{d}) q = {q} L = {:?}: closed {closed} numeric {} tail bound {}",
                        l.blocks(),
                        num.estimate,
                        num.tail_bound
                    ));
                }
                cells += 1;
            }
            if (r, d) == (2, 1) {
                let v = j_rectangular(2, 1, &Levi::torus(2), &backend).map_err(err)?;
                if (v.abs() - gl2_closed_form(q)).abs() > 1e-12 {
                    return Err(format!("GL(2) at q = {q}: {v} vs closed form {}", gl2_closed_form(q)));
                }
            }
        }
    }
    Ok(format!("{cells} (orbit, q, L) cases at depth 8, max relative residual {worst_rel:.1e}; GL(2) closed form to 1e-12"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let o = NilpotentOrbit::new(Partition::new(vec![2, 1]));
    let terms = development(&o, &[Place::Real, Place::Padic(2)], 1000).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    if terms.len() != 2 {
        return Err(format!("{} terms", terms.len()));
    }
    let data = OrbitData::new(&o).map_err(err)?;
    let m = data.m.block_sizes();
    let vol = vol_levi(&m).map_err(err)?;
    let one_based: Vec<Vec<usize>> = data.m.blocks().iter().map(|b| b.iter().map(|a| a + 1).collect()).collect();
    let mut a_g = None;
    for t in &terms {
        let c = t.coefficient.as_ref().ok_or_else(|| format!("missing coefficient for {:?}", t.levi))?;
        if t.levi == one_based {
            if c.value != vol {
                return Err(format!("(M,(0)) coefficient {} ≠ vol {vol}", c.value));
            }
        } else {
            if c.l1_spread > 1e-8 {
                return Err(format!("a^G depends on L1: spread {:e}", c.l1_spread));
            }
            if c.value.abs() > c.bound {
                return Err(format!("|a^G| = {} above the bound {}", c.value.abs(), c.bound));
            }
            a_g = Some(c.value);
        }
    }
    if secs >= 300.0 {
        return Err(format!("took {secs:.1} s"));
    }
    let a_g = a_g.ok_or("no G term")?;
    Ok(format!("2 terms, a^M = vol = {vol:.6}, a^G = {a_g:.6}, {secs:.2} s"))
}

fn criterion_8() -> Outcome {
    let mut count = 0;
    for (i, o) in orbits_up_to(5).enumerate() {
        let r = verify::solve_suite(&o, 100, 800 + i as u64).map_err(err)?;
        if !r.ok {
            return Err(format!("{:?}: {} of {} solved", r.partition, r.successes, r.trials));
        }
        count += 1;
    }
    Ok(format!("{count} orbits × 100 perturbations solved exactly"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "Richardson bijection", criterion_1),
        (2, "fiber law", criterion_2),
        (3, "weight identities", criterion_3),
        (4, "(G,M)-family identities", criterion_4),
        (5, "zeta identities", criterion_5),
        (6, "local integral vs lattice sum", criterion_6),
        (7, "coefficients of (2,1)", criterion_7),
        (8, "conjugator into N", criterion_8),
    ];
    let handles: Vec<_> = criteria
        .iter()
        .map(|&(i, name, f)| (i, name, std::thread::spawn(f)))
        .collect();
    let mut failed = 0;
    for (i, name, h) in handles {
        let res = h.join().unwrap_or_else(|_| Err("panicked".into()));
        match res {
            Ok(detail) => println!("criterion {i} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {i} FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria pass");
}
