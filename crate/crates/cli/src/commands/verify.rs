use super::{render, Output};
use crate::config::{ConfigFile, RunConfig};
use crate::report::{Check, Report};
use crate::{FieldForm, Failure, Suite, VerifyArgs};
use hspline::gramian::orthonormality_check_phi1;
use hspline::kernels::{kernel_from_slice, kernel_phi1_kernel, kernel_recursion, weyl_norm_check, Slice2D};
use hspline::splines::nonsymmetry::{minimize_residual, nonsymmetry_residual, NONSYMMETRY_THRESHOLD};
use hspline::splines::vector_field::{admissible_points, vector_field_check_with, Field, RhsForm};
use hspline::splines::{periodization_check, spline_integral};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::SQRT_2;

fn orders(requested: Option<usize>, default: &[usize], allowed: &[usize]) -> Result<Vec<usize>, Failure> {
    match requested {
        Some(n) if allowed.contains(&n) => Ok(vec![n]),
        Some(n) => Err(Failure::usage(format!("order {n} not supported by this suite (allowed: {allowed:?})"))),
        None => Ok(default.to_vec()),
    }
}

pub fn run(a: &VerifyArgs, file: &ConfigFile, cfg: &RunConfig) -> Result<Output, Failure> {
    let n = file.n.or(a.n);
    let points = file.points.or(a.points);
    let mut rep = Report::new("verify", suite_name(a.suite));
    match a.suite {
        Suite::Integrals => {
            for n in orders(n, &[1, 2], &[1, 2, 3])? {
                let tol = [0.0, 1e-6, 1e-3][n - 1];
                let expected = SQRT_2.powi(n as i32);
                rep.check(Check::within(format!("integral of phi{n} = sqrt2^{n}"), expected, spline_integral(n)?, tol));
            }
        }
        Suite::Periodization => {
            let count = points.unwrap_or(20);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let xy: Vec<(f64, f64)> = (0..count).map(|_| (rng.gen_range(0.0..2.0), rng.gen_range(0.0..1.0))).collect();
            for n in orders(n, &[1, 2], &[1, 2])? {
                let expected = SQRT_2.powi(n as i32 - 2);
                let tol = if n == 1 { 1e-10 } else { 1e-4 };
                let mut worst = expected;
                for &(x, y) in &xy {
                    let v = periodization_check(n, x, y)?;
                    if (v - expected).abs() > (worst - expected).abs() {
                        worst = v;
                    }
                }
                rep.check(Check::within(format!("periodization of phi{n} over {count} points (worst)"), expected, worst, tol));
            }
        }
        Suite::Orthonormality => {
            let w = file.window.or(a.window).unwrap_or(1);
            let dev = orthonormality_check_phi1(w)?;
            rep.value("translates", ((2 * w + 1) as f64).powi(3));
            rep.check(Check::within(format!("max |G - I| over window {w}"), 0.0, dev, 1e-8));
        }
        Suite::Kernels => {
            let lams = if a.lambda.is_empty() { vec![0.25, 0.37, 0.8] } else { a.lambda.clone() };
            let xi: Vec<f64> = (0..20).map(|i| -1.0 + 3.0 * i as f64 / 19.0).collect();
            let eta: Vec<f64> = (0..20).map(|i| -0.5 + 3.0 * i as f64 / 19.0).collect();
            for &lam in &lams {
                let rec = kernel_recursion(&kernel_phi1_kernel(lam)?)?.sample(&xi, &eta);
                let direct = kernel_from_slice(&Slice2D::phi2(lam)).sample(&xi, &eta);
                let dev = rec.iter().zip(&direct).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
                rep.check(Check::within(format!("kernel recursion vs phi2 slice kernel, lambda {lam}"), 0.0, dev, 1e-4));
                for (name, s) in [("phi1", Slice2D::phi1(lam)), ("phi2", Slice2D::phi2(lam))] {
                    let w = weyl_norm_check(&s)?;
                    rep.check(Check::within(format!("Weyl norm relation {name}, lambda {lam}"), w.lhs, w.rhs, 1e-6 * w.lhs.abs()));
                }
            }
        }
        Suite::VectorFields => {
            let n = n.unwrap_or(1);
            let h = file.h.or(a.h).unwrap_or(1e-4);
            let count = points.unwrap_or(10);
            let form = match a.form {
                FieldForm::Printed => RhsForm::Printed,
                FieldForm::ChainRule => RhsForm::ChainRule,
            };
            let pts = admissible_points(count, h);
            for f in Field::ALL {
                let mut worst: f64 = 0.0;
                for p in &pts {
                    worst = worst.max(vector_field_check_with(n, f, *p, h, form)?.residual);
                }
                rep.check(Check::within(format!("{f:?} phi{} residual, {count} points", n + 1), 0.0, worst, 1e-3));
            }
            if form == RhsForm::Printed {
                rep.note("X and Y differ from the difference-operator form by -y/2 and x/2 times the t-derivative; use --form chain-rule");
            }
        }
        Suite::Nonsymmetry => {
            for n in orders(n, &[1, 2], &[1, 2])? {
                if n == 1 {
                    rep.check(Check::within("phi1 residual at alpha 1/2", 0.0, nonsymmetry_residual(1, 0.5)?, 1e-8));
                } else {
                    let (alpha, r) = minimize_residual(2, -3.0, 4.0, 29)?;
                    rep.value("phi2 minimizing alpha", alpha);
                    rep.check(Check::above("phi2 min residual over alpha", NONSYMMETRY_THRESHOLD, r));
                }
            }
        }
    }
    Ok(render(&rep, cfg.format))
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Integrals => "integrals",
        Suite::Periodization => "periodization",
        Suite::Orthonormality => "orthonormality",
        Suite::Kernels => "kernels",
        Suite::VectorFields => "vector-fields",
        Suite::Nonsymmetry => "nonsymmetry",
    }
}
