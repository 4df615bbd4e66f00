use super::{parse_bspline, render, Output};
use crate::config::{ConfigFile, RunConfig};
use crate::report::{Check, Report, Series};
use crate::{DualArgs, Failure};
use hspline::duals::{assemble_moment_system, index_window, solve_dual_with, verify_biorthogonality, Generator, SolveOptions};
use hspline::hfun::HFunction;
use hspline::splines::{phi_function, support_box};
use hspline::{HPoint, LatticeIndex};

pub fn run(a: &DualArgs, file: &ConfigFile, cfg: &RunConfig) -> Result<Output, Failure> {
    let (phi, window, name, tol) = if let Some(s) = &a.separable {
        let k = parse_bspline(s)?;
        (Generator::separable(k), index_window(1, k as f64)?, format!("separable B{k}"), 1e-6)
    } else {
        let n = a.phi.expect("clap enforces one generator");
        let f = phi_function(n)?;
        let sb = support_box(n);
        let m = sb.lo[2].abs().max(sb.hi[2].abs());
        let tol = if n == 1 { 1e-8 } else { 1e-6 };
        (Generator::General(f), index_window(n, m)?, format!("phi{n}"), tol)
    };
    let sys = assemble_moment_system(&phi, &window, &cfg.quad)?;
    let mut dual = solve_dual_with(&sys, &phi, SolveOptions::default())?;
    let mut rep = Report::new("dual", name);
    rep.value("condition number", dual.condition);
    rep.value("rank", dual.rank as f64);
    for (g, d) in dual.window.iter().zip(&dual.coeffs) {
        rep.value(format!("d({},{},{})", g.k, g.l, g.m), *d);
    }
    let perturb = file.perturb.or(a.perturb);
    if let Some(delta) = perturb {
        dual = dual.perturbed(LatticeIndex::ZERO, delta);
        rep.note(format!("d(0,0,0) perturbed by {delta}"));
    }
    let dev = verify_biorthogonality(&phi, &dual, &window)?;
    rep.check(Check::within("biorthogonality max |<L_g phi, dual> - delta|", 0.0, dev, tol));

    let steps = file.samples.or(a.samples).unwrap_or(10).max(1);
    let rows: Vec<Vec<f64>> = (0..=steps)
        .map(|i| {
            let t = i as f64 / steps as f64;
            vec![t, dual.eval(HPoint::new(1.0, 0.5, t))]
        })
        .collect();
    if a.separable.as_deref().map(parse_bspline).transpose()? == Some(3) && perturb.is_none() {
        let prof = rows.iter().map(|r| (r[1] - 1.5 * (40.0 * r[0] * r[0] - 36.0 * r[0] + 5.0)).abs()).fold(0.0, f64::max);
        rep.check(Check::within("profile vs 1.5(40t^2 - 36t + 5)", 0.0, prof, 1e-8));
    }
    rep.series = Some(Series { columns: vec!["t".into(), "dual".into()], rows });
    Ok(render(&rep, cfg.format))
}
