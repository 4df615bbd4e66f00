use super::{parse_triple, render, Output};
use crate::cache::{self, CacheHeader};
use crate::config::{ConfigFile, Format, RunConfig};
use crate::report::{Report, Series};
use crate::{EvalArgs, Failure, Method};
use hspline::splines::{phi3_default_spec, support_box, EvalStrategy, InversionSpec, SplineModel};
use hspline::HPoint;

/// The strategy plus the (name, tolerance) pair that keys the cache.
fn strategy(n: usize, method: Option<Method>, cfg: &RunConfig) -> Result<(EvalStrategy, String, f64), Failure> {
    let m = method.unwrap_or(match n {
        1 => Method::Closed,
        2 => Method::Slice,
        _ => Method::Direct,
    });
    Ok(match m {
        Method::Closed => (EvalStrategy::ClosedForm, "closed".into(), 0.0),
        Method::Slice => {
            let spec = InversionSpec { lambda_max: cfg.lambda_max, ..InversionSpec::default() };
            (EvalStrategy::SliceTransform(spec), format!("slice:lambda_max={:e}", cfg.lambda_max), spec.tail_tol)
        }
        Method::Direct => {
            let spec = phi3_default_spec();
            let tol = if n == 3 { spec.abs_tol } else { 0.0 };
            (EvalStrategy::NestedQuadrature(spec), "direct".into(), tol)
        }
    })
}

pub fn run(a: &EvalArgs, file: &ConfigFile, cfg: &RunConfig) -> Result<Output, Failure> {
    let n = file.n.or(a.n).ok_or_else(|| Failure::usage("eval needs --n"))?;
    let (strat, method, tol) = strategy(n, a.method, cfg)?;
    let mut model = SplineModel::with_strategy(n, strat)?;

    if a.points.is_empty() && a.grid_shape.is_none() {
        return Err(Failure::usage("eval needs --point or --grid-shape"));
    }
    if !a.points.is_empty() && a.grid_shape.is_some() {
        return Err(Failure::usage("use either --point or --grid-shape, not both"));
    }

    if !a.points.is_empty() {
        let mut rows = Vec::with_capacity(a.points.len());
        for s in &a.points {
            let [x, y, t] = parse_triple(s, "--point")?;
            rows.push(vec![x, y, t, model.eval(HPoint::new(x, y, t))?]);
        }
        if cfg.format == Format::Table {
            // plain values, shortest round-trip form
            let text: String = rows.iter().map(|r| format!("{}\n", r[3])).collect();
            return Ok(Output { text, pass: true });
        }
        let mut rep = Report::new("eval", format!("phi{n}"));
        rep.series = Some(Series { columns: ["x", "y", "t", "value"].map(String::from).to_vec(), rows });
        return Ok(render(&rep, cfg.format));
    }

    let shape_f = parse_triple(a.grid_shape.as_deref().unwrap(), "--grid-shape")?;
    if shape_f.iter().any(|&s| s < 1.0 || s.fract() != 0.0) {
        return Err(Failure::usage("--grid-shape entries must be positive integers"));
    }
    let shape = shape_f.map(|s| s as usize);
    let sb = support_box(n);
    let lo = match &a.grid_lo {
        Some(s) => parse_triple(s, "--grid-lo")?,
        None => sb.lo,
    };
    let hi = match &a.grid_hi {
        Some(s) => parse_triple(s, "--grid-hi")?,
        None => sb.hi,
    };
    let header = CacheHeader::new(n, lo, hi, shape, tol, &method);
    let cached = if a.refresh_cache { None } else { cache::load(&cfg.cache_dir, &header)? };
    let grid = match cached {
        Some(g) => {
            eprintln!("cache hit: {}", cfg.cache_dir.join(header.file_name()).display());
            g
        }
        None => {
            let g = model.sample_grid(lo, hi, shape)?.clone();
            let path = cache::store(&cfg.cache_dir, &header, &g)?;
            eprintln!("cache written: {}", path.display());
            g
        }
    };

    let mut rep = Report::new("eval", format!("phi{n} grid"));
    rep.value("samples", grid.samples.len() as f64);
    rep.value("min", grid.samples.iter().copied().fold(f64::INFINITY, f64::min));
    rep.value("max", grid.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    rep.note(format!("cache file {}", header.file_name()));
    rep.note(format!("method {method}"));
    if cfg.format == Format::Csv {
        let rows = (0..grid.samples.len())
            .map(|i| {
                let p = grid.point(i);
                vec![p.x, p.y, p.t, grid.samples[i]]
            })
            .collect();
        rep.series = Some(Series { columns: ["x", "y", "t", "value"].map(String::from).to_vec(), rows });
    }
    Ok(render(&rep, cfg.format))
}
