use super::{parse_bspline, render, Output};
use crate::config::{ConfigFile, RunConfig};
use crate::report::{Check, Report, Series};
use crate::{Failure, RieszArgs};
use hspline::bspline::bspline_hat;
use hspline::gramian::phi2_bounds::{
    lambda_grid, lower_estimates_with, upper_bound_brackets, upper_bound_phi2, IForm, J_INDICES, REFERENCE_LOWER_ESTIMATES,
};
use hspline::gramian::{a_p, psi_minimize, riesz_bounds_separable, separable_symbol};
use hspline::rsum::Decay;
use num_complex::Complex64;

/// Plain truncated r-sum, the independent oracle for the separable symbol.
fn brute_symbol(k: usize, lambda: f64) -> f64 {
    (-20_000i64..=20_000).map(|r| bspline_hat(k, r as f64 - lambda).norm_sqr()).sum()
}

pub fn run(a: &RieszArgs, _file: &ConfigFile, cfg: &RunConfig) -> Result<Output, Failure> {
    let grid = lambda_grid(cfg.lambda_grid);
    let rep = if let Some(s) = &a.separable {
        let k = parse_bspline(s)?;
        let mut rep = Report::new("riesz", format!("separable B{k}"));
        let decay = Decay::Accelerated { p: 2.0 * k as f64 };
        let b = riesz_bounds_separable(|w| bspline_hat(k, w), cfg.r_tol, decay)?;
        rep.value("A", b.lower);
        rep.value("B", b.upper);
        rep.value("argmin lambda", b.argmin);
        rep.value("argmax lambda", b.argmax);
        let rows: Vec<Vec<f64>> = grid
            .iter()
            .map(|&l| separable_symbol(&|w| bspline_hat(k, w), l, cfg.r_tol, decay).map(|v| vec![l, v]))
            .collect::<Result<_, _>>()?;
        if k == 1 {
            // Σ_r sinc²(r − λ) = 1 identically
            rep.check(Check::within("A = 2", 2.0, b.lower, 1e-8));
            rep.check(Check::within("B = 2", 2.0, b.upper, 1e-8));
        } else {
            let brute: Vec<f64> = grid.iter().map(|&l| 2.0 * brute_symbol(k, l)).collect();
            let lo = brute.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = brute.iter().copied().fold(0.0, f64::max);
            rep.check(Check::within("A vs brute-force r-sum", lo, b.lower, 1e-6));
            rep.check(Check::within("B vs brute-force r-sum", hi, b.upper, 1e-6));
        }
        rep.series = Some(Series { columns: vec!["lambda".into(), "symbol".into()], rows });
        rep
    } else if a.phi2_bounds {
        let mut rep = Report::new("riesz", "phi2 bounds");
        let brackets = upper_bound_brackets();
        for (j, b) in J_INDICES.iter().zip(brackets) {
            rep.value(format!("bracket j={j}"), b);
        }
        let upper = upper_bound_phi2();
        rep.check(Check::within("upper bound B", 1.715, upper, 0.01));
        let est = lower_estimates_with(cfg.lambda_grid, cfg.r_tol, IForm::Printed)?;
        rep.check(Check::at_most("max over grid of sum_r |I_1|", brackets[0], est.max_sum_abs[0]));
        for (i, j) in J_INDICES.iter().enumerate() {
            let r = REFERENCE_LOWER_ESTIMATES[i];
            rep.value(format!("argmin lambda j={j}"), est.argmin[i]);
            rep.check(Check::within(format!("lower estimate j={j} (5% relative)"), r, est.min_abs_sum[i], 0.05 * r));
        }
        rep.note("lower estimates are min over the grid of |sum_r I_j|; see README for the comparison with the reference values");
        rep
    } else if a.psi_min {
        let mut rep = Report::new("riesz", "psi minimum");
        let m = psi_minimize()?;
        rep.check(Check::within("lambda0", 0.762714, m.lambda0, 1e-4));
        rep.check(Check::within("Psi(lambda0)", 0.638135, m.psi_min, 1e-4));
        rep.check(Check::within("Psi''(lambda0)", 12.8421, m.psi_second, 1e-2));
        rep
    } else {
        let p = a.chi.expect("clap enforces one generator");
        if p == 0 {
            return Err(Failure::usage("--chi needs p ≥ 1"));
        }
        let pf = p as f64;
        let mut rep = Report::new("riesz", format!("chi p={p}"));
        let zero = Complex64::new(0.0, 0.0);
        let h = move |w: f64| if (0.0..pf).contains(&w) { Complex64::new(1.0, 0.0) } else { zero };
        let dev = grid
            .iter()
            .map(|&l| separable_symbol(&h, l, 0.0, Decay::Compact { radius: p as i64 + 2 }).map(|s| (s - pf).abs()))
            .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))?;
        rep.check(Check::within("symbol constant = p", 0.0, dev, 0.0));
        // p − A_p on a fine grid
        let (mut lmin, mut vmin) = (0.0, f64::INFINITY);
        let mut rows = Vec::new();
        for i in 0..=1000 {
            let l = i as f64 / 1000.0;
            let v = pf - a_p(p, l)?;
            if v < vmin {
                (lmin, vmin) = (l, v);
            }
            if i % 10 == 0 {
                rows.push(vec![l, v]);
            }
        }
        rep.value("min p - A_p", vmin);
        rep.value("argmin lambda", lmin);
        if p >= 3 {
            rep.check(Check::above("p - A_p stays positive", 0.0, vmin));
        }
        rep.series = Some(Series { columns: vec!["lambda".into(), "p_minus_a_p".into()], rows });
        rep
    };
    Ok(render(&rep, cfg.format))
}
