use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use szegedy_core::evolution::{
    continuous_evolve, continuous_evolve_matrix_free, convergence_scan, discrete_evolve,
    subspace_leakage,
};
use szegedy_core::linalg::{random_unit_vector, spectral_norm};
use szegedy_core::operators::check_epsilon;
use szegedy_core::spectral::{birth_spaces, inherited_space, spectrum_report};
use szegedy_core::{CMatrix, ErrorMetric, WalkError, WalkOperators, C64};

use crate::config::{build_coin, build_graph, build_operators, parse_n_list, UsageError};
use crate::{EvolveMode, Format, WalkArgs};

struct Walk {
    ops: WalkOperators,
    graph_name: String,
}

fn load(args: &WalkArgs) -> Result<Walk, UsageError> {
    let (g, graph_name) = build_graph(&args.graph, args.size)?;
    let coin = build_coin(&args.coin, &g)?;
    Ok(Walk {
        ops: build_operators(g, coin)?,
        graph_name,
    })
}

fn require_dense(walk: &Walk) -> Result<(), UsageError> {
    walk.ops.dense().map(|_| ()).map_err(|_| {
        UsageError(format!(
            "{} arcs is too large for dense operators (budget {})",
            walk.ops.n_arcs(),
            szegedy_core::DENSE_ARC_BUDGET
        ))
    })
}

fn emit(args: &WalkArgs, text: &str) -> Result<(), UsageError> {
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn csv_pairs(pairs: &[(&str, String)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in pairs {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

pub fn info(args: &WalkArgs) -> Result<bool, UsageError> {
    let walk = load(args)?;
    let ops = &walk.ops;
    let g = ops.graph();
    let dims = if ops.dense().is_ok() {
        let births = birth_spaces(ops)?;
        Some((
            inherited_space(ops)?.dim(),
            births.plus.dim(),
            births.minus.dim(),
        ))
    } else {
        None
    };
    let value = json!({
        "graph": walk.graph_name,
        "coin": ops.coin().kind().name(),
        "n_vertices": g.n_vertices(),
        "n_arcs": g.n_arcs(),
        "degrees": g.degrees(),
        "sum_p": ops.vertex_dim(),
        "identity_coin_vertices": ops.coin().identity_vertices(),
        "dim_inherited": dims.map(|d| d.0),
        "dim_b_plus": dims.map(|d| d.1),
        "dim_b_minus": dims.map(|d| d.2),
    });
    let text = match args.format {
        Format::Json => to_json(&value),
        Format::Csv => {
            let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
            let degrees: Vec<String> = g.degrees().iter().map(|d| d.to_string()).collect();
            csv_pairs(&[
                ("graph", walk.graph_name.clone()),
                ("coin", ops.coin().kind().name().to_string()),
                ("n_vertices", g.n_vertices().to_string()),
                ("n_arcs", g.n_arcs().to_string()),
                ("degrees", degrees.join(";")),
                ("sum_p", ops.vertex_dim().to_string()),
                ("dim_inherited", opt(dims.map(|d| d.0))),
                ("dim_b_plus", opt(dims.map(|d| d.1))),
                ("dim_b_minus", opt(dims.map(|d| d.2))),
            ])
        }
    };
    emit(args, &text)?;
    Ok(true)
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

#[allow(clippy::too_many_arguments)]
pub fn evolve(
    args: &WalkArgs,
    state: &str,
    t: f64,
    steps: usize,
    eps: Option<f64>,
    mode: EvolveMode,
    tolerance: Option<f64>,
) -> Result<bool, UsageError> {
    let walk = load(args)?;
    let ops = &walk.ops;
    let psi0 = crate::config::build_state(state, ops)?;
    let eps = eps.unwrap_or(if steps > 0 { t / steps as f64 } else { 0.0 });
    check_epsilon(eps)?;
    if tolerance.is_some() && mode != EvolveMode::Both {
        return Err(UsageError("--tolerance needs --mode both".into()));
    }
    let discrete = match mode {
        EvolveMode::Continuous => None,
        _ => Some(discrete_evolve(ops, &psi0, eps, steps)?),
    };
    let continuous = match mode {
        EvolveMode::Discrete => None,
        _ if ops.dense().is_ok() => Some(continuous_evolve(ops, &psi0, t)?),
        _ => Some(continuous_evolve_matrix_free(ops, &psi0, t)?),
    };
    let diffs: Option<Vec<f64>> = match (&discrete, &continuous) {
        (Some(a), Some(b)) => Some((a - b).iter().map(|z| z.norm()).collect()),
        _ => None,
    };
    let max_diff = diffs
        .as_ref()
        .map(|d| d.iter().copied().fold(0.0, f64::max));

    let text = match args.format {
        Format::Json => {
            let arcs: Vec<Value> = ops
                .graph()
                .arcs()
                .iter()
                .enumerate()
                .map(|(i, arc)| {
                    json!({
                        "index": i,
                        "origin": arc.origin,
                        "terminus": arc.terminus,
                        "discrete": discrete.as_ref().map(|v| pair(v[i])),
                        "continuous": continuous.as_ref().map(|v| pair(v[i])),
                        "abs_diff": diffs.as_ref().map(|d| d[i]),
                    })
                })
                .collect();
            to_json(&json!({
                "graph": walk.graph_name,
                "coin": ops.coin().kind().name(),
                "t": t,
                "eps": eps,
                "steps": steps,
                "max_abs_diff": max_diff,
                "arcs": arcs,
            }))
        }
        Format::Csv => {
            let mut out = String::from(
                "arc,origin,terminus,discrete_re,discrete_im,continuous_re,continuous_im,abs_diff\n",
            );
            let cell = |v: Option<f64>| v.map(|x| format!("{x:.11e}")).unwrap_or_default();
            for (i, arc) in ops.graph().arcs().iter().enumerate() {
                let d = discrete.as_ref().map(|v| v[i]);
                let c = continuous.as_ref().map(|v| v[i]);
                out.push_str(&format!(
                    "{i},{},{},{},{},{},{},{}\n",
                    arc.origin,
                    arc.terminus,
                    cell(d.map(|z| z.re)),
                    cell(d.map(|z| z.im)),
                    cell(c.map(|z| z.re)),
                    cell(c.map(|z| z.im)),
                    cell(diffs.as_ref().map(|v| v[i])),
                ));
            }
            out
        }
    };
    emit(args, &text)?;
    if let Some(m) = max_diff {
        eprintln!("max per-arc difference {m:.6e}");
    }
    Ok(match (tolerance, max_diff) {
        (Some(tol), Some(m)) => m < tol,
        _ => true,
    })
}

pub fn converge(args: &WalkArgs, t: f64, n_list: &str, probe: bool) -> Result<bool, UsageError> {
    let walk = load(args)?;
    let ns = parse_n_list(n_list)?;
    let metric = if probe {
        ErrorMetric::StateProbe { seed: args.seed }
    } else {
        ErrorMetric::OperatorNorm
    };
    let mut rec = match convergence_scan(&walk.ops, t, &ns, metric) {
        Err(WalkError::DenseUnavailable | WalkError::DenseBudget { .. }) => {
            return Err(UsageError(format!(
                "{} arcs is too large for the operator-norm metric; rerun with --probe",
                walk.ops.n_arcs()
            )))
        }
        other => other?,
    };
    rec.graph = walk.graph_name.clone();
    let text = match args.format {
        Format::Json => {
            let mut s = rec.to_json();
            s.push('\n');
            s
        }
        Format::Csv => rec.to_csv(),
    };
    emit(args, &text)?;
    if rec.exact {
        eprintln!("t = 0: propagators agree exactly");
        return Ok(true);
    }
    match rec.fitted_slope {
        None => {
            eprintln!("warning: a slope needs at least two step counts; omitted");
            Ok(true)
        }
        Some(slope) => {
            eprintln!("slope {slope:.4}, c0 estimate {:.6}", rec.c0_estimate);
            Ok((-1.3..=-0.8).contains(&slope) && rec.is_monotone_from(16))
        }
    }
}

pub fn spectrum(args: &WalkArgs) -> Result<bool, UsageError> {
    let walk = load(args)?;
    require_dense(&walk)?;
    let report = spectrum_report(&walk.ops)?;
    let text = match args.format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::from("lambda,mult_predicted,mult_computed,residual\n");
            for r in &report.rows {
                let res = r.residual.map(|x| format!("{x:.11e}")).unwrap_or_default();
                out.push_str(&format!(
                    "{:.11e},{},{},{res}\n",
                    r.lambda, r.mult_predicted, r.mult_computed
                ));
            }
            out
        }
    };
    emit(args, &text)?;
    if !report.pass {
        for r in report.unmatched() {
            eprintln!(
                "unmatched eigenvalue {:.12}: predicted {}, computed {}",
                r.lambda, r.mult_predicted, r.mult_computed
            );
        }
    }
    Ok(report.pass)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    bound: f64,
    pass: bool,
}

fn check(name: &'static str, value: f64, bound: f64) -> Check {
    Check {
        name,
        value,
        bound,
        pass: value < bound,
    }
}

pub fn verify(args: &WalkArgs, t: f64, eps: f64) -> Result<bool, UsageError> {
    let walk = load(args)?;
    require_dense(&walk)?;
    check_epsilon(eps)?;
    let ops = &walk.ops;
    let dn = ops.dense()?;
    let n = ops.n_arcs();
    let eye = |k: usize| CMatrix::identity(k, k);
    let two = C64::new(2.0, 0.0);
    let (h, d, tm, so) = (
        &dn.hamiltonian,
        &dn.boundary,
        &dn.discriminant,
        &dn.flip_flop,
    );
    let ds = d.adjoint();

    let mut checks = vec![
        check(
            "|dd* - I|",
            spectral_norm(&(d * &ds - eye(ops.vertex_dim()))),
            1e-12,
        ),
        check(
            "|C - (2d*d - I)|",
            spectral_norm(&(&dn.coin - (&ds * d * two - eye(n)))),
            1e-12,
        ),
        check(
            "|C^2 - I|",
            spectral_norm(&(&dn.coin * &dn.coin - eye(n))),
            1e-12,
        ),
        check(
            "|HL - LT~|",
            spectral_norm(&(h * &dn.lifted - &dn.lifted * &dn.tilde_t)),
            1e-11,
        ),
        check("|Hd* - d*T|", spectral_norm(&(h * &ds - &ds * tm)), 1e-11),
        check("|dH - Td|", spectral_norm(&(d * h - tm * d)), 1e-11),
        check(
            "|HS_od* - (2d*T^2 - S_od*T)|",
            spectral_norm(&(h * so * &ds - (&ds * (tm * tm) * two - so * &ds * tm))),
            1e-11,
        ),
        check("|H| - 1", spectral_norm(h) - 1.0, 1e-12),
    ];

    let inherited = inherited_space(ops)?.basis;
    let birth = birth_spaces(ops)?.all.basis;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut leak_h: f64 = 0.0;
    let mut leak_u: f64 = 0.0;
    for (space, complement) in [(&inherited, &birth), (&birth, &inherited)] {
        if space.ncols() == 0 {
            continue;
        }
        for _ in 0..3 {
            let phi = space * random_unit_vector(&mut rng, space.ncols());
            leak_h = leak_h.max(subspace_leakage(
                &continuous_evolve(ops, &phi, t)?,
                complement,
            ));
            leak_u = leak_u.max(subspace_leakage(&ops.step_apply(eps, &phi)?, complement));
        }
    }
    checks.push(check("leakage of e^{itH} between I and B", leak_h, 1e-10));
    checks.push(check("leakage of U(eps) between I and B", leak_u, 1e-10));

    let pass = checks.iter().all(|c| c.pass);
    let text = match args.format {
        Format::Json => to_json(&json!({
            "graph": walk.graph_name,
            "coin": ops.coin().kind().name(),
            "t": t,
            "eps": eps,
            "seed": args.seed,
            "checks": checks,
            "pass": pass,
        })),
        Format::Csv => {
            let mut out = String::from("check,value,bound,pass\n");
            for c in &checks {
                out.push_str(&format!(
                    "\"{}\",{:.11e},{:e},{}\n",
                    c.name, c.value, c.bound, c.pass
                ));
            }
            out
        }
    };
    emit(args, &text)?;
    Ok(pass)
}
