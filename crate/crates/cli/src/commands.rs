use crate::args::{Command, Common};
use crate::emit::{cell, cx, cx_cells, cxs, num, Table};
use fingap_core::commuting_operator::{algebraic_relation_check, determinant_formula_proven, determinant_operator_coeffs, verify_commutator};
use fingap_core::elliptic::DEFAULT_TRUNC;
use fingap_core::heun_map::{cycle_monodromy_eigenvalues, cycle_winding_numbers, heun_to_ino, ino_to_heun};
use fingap_core::invariant_space::build_invariant_space;
use fingap_core::monodromy::{base_sign_at_root, choose_base, direct_multiplier, hyperelliptic_multiplier, Period};
use fingap_core::spectral_curve::{compute_curve, SpectralCurve};
use fingap_core::spectral_problem::{band_structure, continue_eigenvalue, trig_eigenvalue};
use fingap_core::xi_solver::{compute_xi, XiExpansion};
use fingap_core::{make_context, Complex64 as C, EllipticContext, Error};
use serde_json::{json, Value};

const TRIALS: usize = 5;
const ROOT_TOL: f64 = 1e-9;

pub enum Failure {
    /// Bad or missing flag: exit 2.
    Usage(String),
    /// The library rejected the input: exit 1.
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

pub struct Report {
    pub results: Value,
    pub table: Table,
    pub diagnostics: Vec<String>,
    /// Set when the artifact was produced but the computation stopped short.
    pub incomplete: Option<String>,
}

impl Report {
    fn new(results: Value, table: Table) -> Self {
        Report { results, table, diagnostics: vec![], incomplete: None }
    }
}

pub fn inputs(cmd: &Command) -> Value {
    let c = cmd.common();
    let mut v = json!({ "l": c.l.l, "normalized": c.l.normalized });
    let o = v.as_object_mut().unwrap();
    if let Some(t) = c.tau {
        o.insert("tau".into(), cx(t));
    }
    if let Some(e) = c.e {
        o.insert("E".into(), cx(e));
    }
    if matches!(cmd, Command::EigenContinue(_)) {
        o.insert("m".into(), json!(c.m));
        if let Some(p) = &c.p_path {
            o.insert("p_path".into(), cxs(&p.0));
        }
    }
    o.insert("tol".into(), num(c.tol));
    v
}

pub fn run(cmd: &Command) -> Result<Report, Failure> {
    let c = cmd.common();
    match cmd {
        Command::Xi(_) => xi(c),
        Command::Curve(_) => curve(c),
        Command::OperatorCheck(_) => operator_check(c),
        Command::Monodromy(_) => monodromy(c),
        Command::Bands(_) => bands(c),
        Command::EigenContinue(_) => eigen_continue(c),
        Command::Heun(_) => heun(c),
    }
}

/// The lattice context, with a longer truncation if the default one has
/// not converged (small Im tau).
fn context(c: &Common) -> Result<EllipticContext, Failure> {
    let tau = c.tau.ok_or_else(|| Failure::Usage("--tau is required for this command".into()))?;
    let mut order = DEFAULT_TRUNC;
    loop {
        match make_context(tau, order) {
            Err(Error::Truncation { .. }) if order < 8 * DEFAULT_TRUNC => order *= 2,
            r => return Ok(r?),
        }
    }
}

fn energy(c: &Common) -> Result<C, Failure> {
    c.e.ok_or_else(|| Failure::Usage("--E is required for this command".into()))
}

fn setup(c: &Common) -> Result<(EllipticContext, XiExpansion, SpectralCurve), Failure> {
    let ctx = context(c)?;
    let xi = compute_xi(&c.l, &ctx)?;
    let curve = compute_curve(&xi, &ctx)?;
    Ok((ctx, xi, curve))
}

fn lattice(ctx: &EllipticContext) -> Value {
    json!({
        "e_values": cxs(&ctx.e_values),
        "eta1": cx(ctx.eta1),
        "g2": cx(ctx.g2),
        "g3": cx(ctx.g3),
        "nome_p": cx(ctx.nome_p),
        "truncation": ctx.trunc_order,
    })
}

fn xi(c: &Common) -> Result<Report, Failure> {
    let ctx = context(c)?;
    let xi = compute_xi(&c.l, &ctx)?;
    let mut table = Table::new(&["term", "i", "power", "k", "re", "im"]);
    for (k, z) in xi.c0.iter().enumerate() {
        let [re, im] = cx_cells(*z);
        table.push(vec!["c0".into(), String::new(), "0".into(), k.to_string(), re, im]);
    }
    let mut terms = vec![];
    for (i, row) in xi.b.iter().enumerate() {
        for (j, coeffs) in row.iter().enumerate() {
            let power = xi.coupling.l[i] as usize - j;
            for (k, z) in coeffs.iter().enumerate() {
                let [re, im] = cx_cells(*z);
                table.push(vec!["b".into(), i.to_string(), power.to_string(), k.to_string(), re, im]);
            }
            terms.push(json!({ "i": i, "power": power, "coefficients": cxs(coeffs) }));
        }
    }
    let mut results = json!({
        "genus": xi.g,
        "c0": cxs(&xi.c0),
        "terms": terms,
        "lattice": lattice(&ctx),
    });
    let mut report_diag = vec![];
    if let Some(e) = c.e {
        let x = C::new(0.25, 0.3 * ctx.tau.im);
        match xi.eval(&ctx, x, e) {
            Ok(v) => {
                results["sample"] = json!({ "x": cx(x), "E": cx(e), "value": cx(v) });
            }
            Err(err) => report_diag.push(format!("no sample value: {err}")),
        }
    }
    let mut r = Report::new(results, table);
    r.diagnostics = report_diag;
    Ok(r)
}

fn sorted_roots(curve: &SpectralCurve) -> Vec<C> {
    let mut r = curve.roots.clone();
    r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    r
}

fn curve(c: &Common) -> Result<Report, Failure> {
    let (ctx, _, curve) = setup(c)?;
    let roots = sorted_roots(&curve);
    let mut table = Table::new(&["kind", "index", "re", "im"]);
    for (kind, zs) in [("Q", &curve.q.c), ("Q1", &curve.q1.c), ("root", &roots)] {
        for (k, z) in zs.iter().enumerate() {
            let [re, im] = cx_cells(*z);
            table.push(vec![kind.into(), k.to_string(), re, im]);
        }
    }
    let mut r = Report::new(
        json!({
            "genus": curve.genus,
            "Q": cxs(&curve.q.c),
            "Q1": cxs(&curve.q1.c),
            "roots": cxs(&roots),
            "x_spread": num(curve.x_spread),
            "lattice": lattice(&ctx),
        }),
        table,
    );
    if !curve.clusters.is_empty() {
        r.diagnostics.push(format!("{} pair(s) of nearly coincident roots", curve.clusters.len()));
    }
    Ok(r)
}

fn operator_check(c: &Common) -> Result<Report, Failure> {
    let (ctx, xi, curve) = setup(c)?;
    let comm = verify_commutator(&xi, &curve, &ctx, TRIALS)?;
    let rel = algebraic_relation_check(&xi, &curve, &ctx, TRIALS)?;
    let mut table = Table::new(&["check", "max_residual", "pass"]);
    let mut diagnostics = vec![];
    let mut results = json!({
        "commutator": { "max_residual": num(comm.max_residual), "pass": comm.max_residual < c.tol,
                        "trials": comm.trials.iter().map(|t| json!({"E": cx(t.e), "residual": num(t.residual)})).collect::<Vec<_>>() },
        "relation": { "max_residual": num(rel.max_residual), "pass": rel.max_residual < c.tol,
                      "trials": rel.trials.iter().map(|t| json!({"E": cx(t.e), "residual": num(t.residual)})).collect::<Vec<_>>() },
    });
    table.push(vec!["commutator".into(), cell(comm.max_residual), (comm.max_residual < c.tol).to_string()]);
    table.push(vec!["relation".into(), cell(rel.max_residual), (rel.max_residual < c.tol).to_string()]);
    if determinant_formula_proven(&xi) {
        let basis = build_invariant_space(&c.l);
        let d = determinant_operator_coeffs(&xi, &basis, &curve, &ctx, false)?;
        results["determinant"] = json!({
            "max_mismatch": num(d.max_mismatch),
            "a0_spread": num(d.a0_spread),
            "kernel_residual": num(d.kernel_residual),
            "pass": d.consistent,
        });
        table.push(vec!["determinant".into(), cell(d.max_mismatch), d.consistent.to_string()]);
    } else {
        diagnostics.push("determinant check skipped: it is established only when two couplings vanish".into());
    }
    for (name, pass) in [("commutator", comm.max_residual < c.tol), ("relation", rel.max_residual < c.tol)] {
        if !pass {
            diagnostics.push(format!("{name} residual above --tol {}", c.tol));
        }
    }
    let mut r = Report::new(results, table);
    r.diagnostics = diagnostics;
    Ok(r)
}

fn monodromy(c: &Common) -> Result<Report, Failure> {
    let (ctx, xi, curve) = setup(c)?;
    let e = energy(c)?;
    let mut table = Table::new(&["period", "method", "re", "im"]);
    let mut out = vec![];
    let mut diagnostics = vec![];
    for (name, p) in [("1", Period::ONE), ("tau", Period::TAU)] {
        if curve.is_root(e, ROOT_TOL) {
            let s = base_sign_at_root(e, &xi, &curve, &ctx, p)?;
            table.push(vec![name.into(), "root-sign".into(), s.to_string(), "0".into()]);
            out.push(json!({ "period": name, "at_root": true, "multiplier": cx(C::new(s as f64, 0.0)) }));
            continue;
        }
        let (e0, s0) = choose_base(&curve, &xi, &ctx, p)?;
        let h = hyperelliptic_multiplier(e, e0, s0, &curve, &xi, &ctx, p)?;
        let d = direct_multiplier(e, Some(h.sqrt_minus_q), &xi, &curve, &ctx, p)?;
        let diff = (d.multiplier - h.multiplier).norm() / h.multiplier.norm().max(1.0);
        if diff > c.tol {
            diagnostics.push(format!("period {name}: methods differ by {diff:.3e}"));
        }
        for (m, z) in [("direct", d.multiplier), ("hyperelliptic", h.multiplier)] {
            let [re, im] = cx_cells(z);
            table.push(vec![name.into(), m.into(), re, im]);
        }
        out.push(json!({
            "period": name,
            "at_root": false,
            "direct": cx(d.multiplier),
            "hyperelliptic": cx(h.multiplier),
            "trace": cx(h.multiplier + 1.0 / h.multiplier),
            "sqrt_minus_q": cx(h.sqrt_minus_q),
            "base_point": cx(e0),
            "base_sign": s0,
            "relative_difference": num(diff),
            "pass": diff <= c.tol,
        }));
    }
    let mut r = Report::new(json!({ "E": cx(e), "periods": out }), table);
    r.diagnostics = diagnostics;
    Ok(r)
}

fn bands(c: &Common) -> Result<Report, Failure> {
    let ctx = context(c)?;
    let b = band_structure(&c.l, &ctx)?;
    let mut table = Table::new(&["gap", "lo", "hi"]);
    for (k, (lo, hi)) in b.gaps.iter().enumerate() {
        table.push(vec![k.to_string(), cell(*lo), cell(*hi)]);
    }
    let mut r = Report::new(
        json!({
            "edges": b.edges.iter().map(|v| num(*v)).collect::<Vec<_>>(),
            "gaps": b.gaps.iter().map(|(lo, hi)| json!([num(*lo), num(*hi)])).collect::<Vec<_>>(),
            "samples": b.samples.iter().map(|s| json!({"E": num(s.e), "abs_multiplier": num(s.abs_multiplier), "in_band": s.in_band})).collect::<Vec<_>>(),
            "consistent": b.consistent,
        }),
        table,
    );
    if !b.consistent {
        r.diagnostics.push("|B| at the sample energies disagrees with the band assignment".into());
    }
    Ok(r)
}

fn eigen_continue(c: &Common) -> Result<Report, Failure> {
    let path = c.p_path.as_ref().ok_or_else(|| Failure::Usage("--p-path is required for eigen-continue".into()))?;
    let t = continue_eigenvalue(c.m, &c.l, &path.0)?;
    let mut table = Table::new(&["p_re", "p_im", "E_re", "E_im", "residual", "near_q_root", "near_q1_root"]);
    let mut samples = vec![];
    for (k, p) in t.p_samples.iter().enumerate() {
        let [pr, pi] = cx_cells(*p);
        let [er, ei] = cx_cells(t.e_values[k]);
        let f = t.flags[k];
        table.push(vec![pr, pi, er, ei, cell(t.residuals[k]), f.near_q_root.to_string(), f.near_q1_root.to_string()]);
        samples.push(json!({
            "p": cx(*p),
            "E": cx(t.e_values[k]),
            "residual": num(t.residuals[k]),
            "near_q_root": f.near_q_root,
            "near_q1_root": f.near_q1_root,
        }));
    }
    let mut r = Report::new(
        json!({
            "m": t.m,
            "class": serde_json::to_value(t.class).expect("class tag serializes"),
            "trigonometric_limit": num(trig_eigenvalue(c.m, &c.l)),
            "samples": samples,
            "completed": t.diagnostic.is_none(),
        }),
        table,
    );
    if c.tau.is_some() {
        r.diagnostics.push("--tau is ignored; the lattice follows the nome path".into());
    }
    if let Some(d) = t.diagnostic {
        r.diagnostics.push(d.clone());
        r.incomplete = Some(d);
    }
    Ok(r)
}

fn heun(c: &Common) -> Result<Report, Failure> {
    let ctx = context(c)?;
    let e = energy(c)?;
    let h = ino_to_heun(&c.l, e, &ctx);
    let (back_l, back_e) = heun_to_ino(&h, &ctx)?;
    let mut diagnostics = vec![];
    let eps = C::new(0.0, -(0.03f64).min(ctx.tau.im / 8.0));
    let winding = cycle_winding_numbers(&ctx, eps, 512)?;
    let xi = compute_xi(&c.l, &ctx)?;
    let curve = compute_curve(&xi, &ctx)?;
    let cycle = match cycle_monodromy_eigenvalues(h.q, &c.l, &curve, &xi, &ctx) {
        Ok(m) => json!({
            "eigenvalues": cxs(&m.eigenvalues),
            "q_integral": cx(m.q_integral),
            "base_q": cx(m.base_q),
            "base_sign": m.base_sign,
        }),
        Err(err) => {
            diagnostics.push(format!("cycle monodromy: {err}"));
            Value::Null
        }
    };
    let params = [
        ("alpha", h.alpha),
        ("beta", h.beta),
        ("gamma", h.gamma),
        ("delta", h.delta),
        ("epsilon", h.epsilon),
        ("q", h.q),
        ("t", h.t),
        ("a", h.a),
        ("c0", h.heun_shift_c0),
        ("fuchs_defect", h.fuchs_defect()),
    ];
    let mut table = Table::new(&["name", "re", "im"]);
    for (name, z) in params {
        let [re, im] = cx_cells(z);
        table.push(vec![name.into(), re, im]);
    }
    let mut results = json!({});
    for (name, z) in params {
        results[name] = cx(z);
    }
    results["round_trip"] = json!({ "l": back_l.l, "E": cx(back_e), "error": num((back_e - e).norm()) });
    results["cycle_monodromy"] = cycle;
    results["winding_numbers"] = json!({ "eps": cx(eps), "centres": ["0", "1", "1/a"], "counts": winding });
    let mut r = Report::new(results, table);
    r.diagnostics = diagnostics;
    Ok(r)
}
