//! Battery of structural identities evaluated at sampled slit points.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{ClassifyError, REPORT_VERSION};
use crate::geometry::{
    canonical_spray, connection, det_f64, divergence, frobenius, fundamental_form, metric, norm, pair, sasaki_metric,
    tension, torsion_with_scale, values, FinslerStructure, GeomError, SlitPoint,
};
use crate::lifts::{
    base_bracket, basis_field, bracket_with_scale, canonical_delta, complete_lift, horizontal_lift, horizontal_section,
    i_map, j_map, lie_form_omega, liouville, spray_field, tilde_lie, tilde_lie_metric, tilde_lie_section, tm_bracket,
    vertical_endomorphism, vertical_lift, BaseVectorField, Bracket, Combination, Section, TMVectorField, TmField,
    VerticalOf,
};
use crate::models::builtin_finsler;
use crate::sampling::{draw_samples, random_base_field, random_section, random_tm_field, random_vector, SamplePlan};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityTolerance {
    pub rel_tol: f64,
    pub divergence_tol: f64,
    pub independence_tol: f64,
}

impl Default for IdentityTolerance {
    fn default() -> Self {
        IdentityTolerance {
            rel_tol: 1e-8,
            divergence_tol: 1e-7,
            independence_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tol {
    Rel,
    Div,
    Independence,
}

/// Identities in report order, each with its statement and tolerance class.
const IDENTITIES: &[(&str, &str, Tol)] = &[
    ("spray_vertical_endomorphism", "JS = C: the base part of S is y", Tol::Rel),
    ("spray_homogeneity", "N y = 2G, from [C, S] = S", Tol::Rel),
    ("tension", "the tension V[X^h, C] of the canonical connection vanishes", Tol::Rel),
    ("torsion", "the torsion of the canonical connection vanishes", Tol::Rel),
    ("horizontal_preserves_f", "X^h F = 0 for the canonical connection", Tol::Rel),
    ("metric_delta", "g(δ, δ) = 2E", Tol::Rel),
    ("omega_liouville_spray", "ω(C, S) = 2E", Tol::Rel),
    ("vertical_derivative_delta", "∇^v_X δ = X for sections X", Tol::Rel),
    ("tilde_lie_delta", "L̃_{X^c} δ = 0", Tol::Rel),
    ("omega_metric_pairing", "ω(Jξ, η) = g(jξ, jη)", Tol::Rel),
    ("divergence_liouville", "div C = n for the Dazord volume", Tol::Div),
    ("divergence_spray", "div S = 0 for the Dazord volume", Tol::Div),
    ("lie_commutator", "L̃_ξ L̃_η - L̃_η L̃_ξ = L̃_[ξ,η] on sections, for projectable ξ, η", Tol::Rel),
    ("lie_j_intertwining", "L̃_{X^c}(jη) = j[X^c, η]", Tol::Rel),
    ("tilde_lie_connection_independence", "L̃_ξ does not depend on the Ehresmann connection", Tol::Independence),
    ("grifone", "j[iX, S] = X for sections X", Tol::Rel),
    ("liouville_omega", "L_C ω = ω", Tol::Rel),
    ("lift_brackets", "brackets of vertical, complete lifts and C, and the Jacobi identity", Tol::Rel),
    ("vertical_endomorphism_liouville", "[J, C] = J", Tol::Rel),
    ("metric_lie_pairing", "(L̃_{X^c} g)(jξ, jη) = (L_{X^c} ω)(Jξ, η)", Tol::Rel),
    ("density_determinant", "|det ω| = det(g)^2", Tol::Rel),
    ("sasaki_liouville", "G(C, C) = 2E for the Sasaki metric", Tol::Rel),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub statement: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityConfig {
    pub command: String,
    pub finsler: String,
    pub dim: usize,
    pub plan: SamplePlan,
    pub tolerances: IdentityTolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub report_version: u32,
    pub artifact_version: String,
    pub config: IdentityConfig,
    pub samples: usize,
    pub checks: Vec<IdentityCheck>,
    pub all_passed: bool,
}

impl IdentityReport {
    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serialisable")
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| u - v).collect()
}

fn tm_vals(f: &dyn TmField, p: &SlitPoint) -> Result<Vec<f64>, GeomError> {
    Ok(values(&f.jets(p, 0)?))
}

fn sec_vals(s: &Section, p: &SlitPoint) -> Result<Vec<f64>, GeomError> {
    Ok(values(&s.jets(p, 0)?))
}

/// Residual of `a = b` with the scale of the bracket producing `a`.
fn bracket_eq(a: &(Vec<f64>, f64), b: &[f64]) -> f64 {
    rel(norm(&sub(&a.0, b)), a.1 + norm(b))
}

/// All identity residuals at one point, in the order of `IDENTITIES`.
pub fn identity_residuals(
    fs: &FinslerStructure,
    reference: &FinslerStructure,
    p: &SlitPoint,
    plan: &SamplePlan,
    index: usize,
) -> Result<Vec<f64>, GeomError> {
    let n = p.dim();
    let mut rng = plan.sample_rng(index);
    let rx = |rng: &mut _| -> BaseVectorField { random_base_field(rng, n).into_field() };
    let e = fs.energy(p)?;
    let two_e = 2.0 * e;
    let s_field = spray_field(fs);
    let s = values(&canonical_spray(fs, p, 0)?);
    let c = liouville(n);
    let mut out = Vec::with_capacity(IDENTITIES.len());

    // JS = C
    out.push(rel(norm(&sub(&s[..n], &p.y)), norm(&p.y)));

    // N y = 2G
    let conn = connection(fs, p)?;
    let ny: Vec<f64> = conn.nonlinear.iter().map(|row| row.iter().zip(&p.y).map(|(a, b)| a * b).sum()).collect();
    let two_g: Vec<f64> = conn.spray.iter().map(|g| 2.0 * g).collect();
    out.push(rel(norm(&sub(&ny, &two_g)), norm(&ny) + norm(&two_g)));

    // tension, normalised by the bracket terms
    let mut t_res: f64 = 0.0;
    let t = tension(fs, p)?;
    for j in 0..n {
        let h = horizontal_lift(fs, basis_field(n, j));
        let (_, scale) = bracket_with_scale(h.as_ref(), c.as_ref(), p)?;
        let col: Vec<f64> = t.iter().map(|row| row[j]).collect();
        t_res = t_res.max(rel(norm(&col), scale));
    }
    out.push(t_res);

    // torsion on basis fields and one random pair
    let mut tor: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let (v, scale) = torsion_with_scale(fs, p, &basis_field(n, i), &basis_field(n, j))?;
                tor = tor.max(rel(norm(&v), scale));
            }
        }
    }
    let (xr, yr) = (rx(&mut rng), rx(&mut rng));
    let (v, scale) = torsion_with_scale(fs, p, &xr, &yr)?;
    out.push(tor.max(rel(norm(&v), scale)));

    // X^h E = 0
    let de = fs.energy_jet(p, 1)?;
    let mut xhf: f64 = 0.0;
    for j in 0..n {
        let h = tm_vals(horizontal_lift(fs, basis_field(n, j)).as_ref(), p)?;
        let terms: Vec<f64> = (0..2 * n).map(|a| h[a] * de.first(a)).collect();
        let total: f64 = terms.iter().sum();
        xhf = xhf.max(rel(total.abs(), terms.iter().map(|v| v.abs()).sum()));
    }
    out.push(xhf);

    // g(δ, δ) = 2E
    let g = metric(fs, p)?;
    out.push(rel((pair(&g, &p.y, &p.y) - two_e).abs(), two_e.abs()));

    // ω(C, S) = 2E
    let w = fundamental_form(fs, p)?;
    let cv = tm_vals(c.as_ref(), p)?;
    out.push(rel((pair(&w, &cv, &s) - two_e).abs(), two_e.abs()));

    // ∇^v_X δ = j[iX, Hδ]
    let xs: Section = Arc::new(random_section(&mut rng, n));
    let h_delta = horizontal_section(fs, canonical_delta(n));
    let b = bracket_with_scale(i_map(xs.clone()).as_ref(), h_delta.as_ref(), p)?;
    let xs_val = sec_vals(&xs, p)?;
    out.push(rel(norm(&sub(&b.0[..n], &xs_val)), b.1 + norm(&xs_val)));

    // L̃_{X^c} δ = 0
    let xc = complete_lift(rx(&mut rng));
    let ld = tilde_lie_section(fs, &xc, &canonical_delta(n), p)?;
    let (_, scale) = bracket_with_scale(xc.as_ref(), &VerticalOf(canonical_delta(n)), p)?;
    out.push(rel(norm(&ld), scale));

    // ω(Jξ, η) = g(jξ, jη)
    let mut pairing: f64 = 0.0;
    for _ in 0..3 {
        let xi = random_vector(&mut rng, 2 * n);
        let eta = random_vector(&mut rng, 2 * n);
        let mut jxi = vec![0.0; n];
        jxi.extend_from_slice(&xi[..n]);
        let lhs = pair(&w, &jxi, &eta);
        let rhs = pair(&g, &xi[..n], &eta[..n]);
        pairing = pairing.max(rel((lhs - rhs).abs(), lhs.abs() + rhs.abs()));
    }
    out.push(pairing);

    // divergences (absolute)
    out.push((divergence(fs, c.as_ref(), p)? - n as f64).abs());
    out.push(divergence(fs, s_field.as_ref(), p)?.abs());

    // commutator of L̃ on sections
    let proj = |rng: &mut _| -> TMVectorField {
        Arc::new(Combination(vec![
            (1.0, complete_lift(rx(rng))),
            (1.0, vertical_lift(rx(rng))),
        ]))
    };
    let (xi, eta) = (proj(&mut rng), proj(&mut rng));
    let sec: Section = Arc::new(random_section(&mut rng, n));
    let a = sec_vals(&tilde_lie(xi.clone(), tilde_lie(eta.clone(), sec.clone())?)?, p)?;
    let bb = sec_vals(&tilde_lie(eta.clone(), tilde_lie(xi.clone(), sec.clone())?)?, p)?;
    let r = sec_vals(&tilde_lie(tm_bracket(xi.clone(), eta.clone()), sec.clone())?, p)?;
    let lhs = sub(&a, &bb);
    out.push(rel(norm(&sub(&lhs, &r)), norm(&a) + norm(&bb) + norm(&r)));

    // L̃_{X^c}(jη) = j[X^c, η]
    let xc2 = complete_lift(rx(&mut rng));
    let eta_tm: TMVectorField = Arc::new(random_tm_field(&mut rng, n));
    let l = sec_vals(&tilde_lie(xc2.clone(), j_map(eta_tm.clone()))?, p)?;
    let jb = bracket_with_scale(xc2.as_ref(), eta_tm.as_ref(), p)?;
    out.push(rel(norm(&sub(&l, &jb.0[..n])), jb.1 + norm(&l)));

    // connection independence: V built from two structures
    let v1 = tilde_lie_section(fs, &xi, &sec, p)?;
    let v2 = tilde_lie_section(reference, &xi, &sec, p)?;
    out.push(rel(norm(&sub(&v1, &v2)), norm(&v1)));

    // Grifone identity
    let gb = bracket_with_scale(i_map(xs.clone()).as_ref(), s_field.as_ref(), p)?;
    out.push(rel(norm(&sub(&gb.0[..n], &xs_val)), gb.1 + norm(&xs_val)));

    // L_C ω = ω
    let lcw = lie_form_omega(fs, c.as_ref(), p)?;
    let diff: f64 = lcw.iter().flatten().zip(w.iter().flatten()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let scale = frobenius(&lcw) + frobenius(&w);
    out.push(rel(diff, scale));

    // bracket rules for lifts
    let (x1, y1) = (rx(&mut rng), rx(&mut rng));
    let xy = base_bracket(x1.clone(), y1.clone());
    let (x1v, y1v, x1c, y1c) = (
        vertical_lift(x1.clone()),
        vertical_lift(y1.clone()),
        complete_lift(x1.clone()),
        complete_lift(y1.clone()),
    );
    let mut rules: f64 = 0.0;
    let zero = vec![0.0; 2 * n];
    rules = rules.max(bracket_eq(&bracket_with_scale(x1v.as_ref(), y1v.as_ref(), p)?, &zero));
    rules = rules.max(bracket_eq(
        &bracket_with_scale(x1c.as_ref(), y1v.as_ref(), p)?,
        &tm_vals(vertical_lift(xy.clone()).as_ref(), p)?,
    ));
    rules = rules.max(bracket_eq(
        &bracket_with_scale(x1c.as_ref(), y1c.as_ref(), p)?,
        &tm_vals(complete_lift(xy).as_ref(), p)?,
    ));
    rules = rules.max(bracket_eq(&bracket_with_scale(c.as_ref(), x1c.as_ref(), p)?, &zero));
    let neg_xv: Vec<f64> = tm_vals(x1v.as_ref(), p)?.iter().map(|v| -v).collect();
    rules = rules.max(bracket_eq(&bracket_with_scale(c.as_ref(), x1v.as_ref(), p)?, &neg_xv));
    rules = rules.max(bracket_eq(&bracket_with_scale(c.as_ref(), s_field.as_ref(), p)?, &s));
    let fields: Vec<TMVectorField> = (0..3)
        .map(|_| -> TMVectorField { Arc::new(random_tm_field(&mut rng, n)) })
        .collect();
    let mut jacobi = vec![0.0; 2 * n];
    let mut jscale = 0.0;
    for k in 0..3 {
        let (a, b, cc) = (&fields[k], &fields[(k + 1) % 3], &fields[(k + 2) % 3]);
        let (v, sc) = bracket_with_scale(a.as_ref(), &Bracket(b.clone(), cc.clone()), p)?;
        jacobi.iter_mut().zip(&v).for_each(|(acc, t)| *acc += t);
        jscale += sc;
    }
    rules = rules.max(rel(norm(&jacobi), jscale));
    out.push(rules);

    // [Jξ, C] - J[ξ, C] = Jξ
    let xi_tm: TMVectorField = Arc::new(random_tm_field(&mut rng, n));
    let jxi = vertical_endomorphism(xi_tm.clone());
    let a = bracket_with_scale(jxi.as_ref(), c.as_ref(), p)?;
    let b = tm_vals(vertical_endomorphism(tm_bracket(xi_tm, c.clone())).as_ref(), p)?;
    let jv = tm_vals(jxi.as_ref(), p)?;
    out.push(rel(norm(&sub(&sub(&a.0, &b), &jv)), a.1 + norm(&b) + norm(&jv)));

    // (L̃_{X^c} g)(jξ, jη) = (L_{X^c} ω)(Jξ, η)
    let xb = rx(&mut rng);
    let lg = tilde_lie_metric(fs, &xb, p)?;
    let lw = lie_form_omega(fs, complete_lift(xb).as_ref(), p)?;
    let mut lp: f64 = 0.0;
    for _ in 0..3 {
        let xi = random_vector(&mut rng, 2 * n);
        let eta = random_vector(&mut rng, 2 * n);
        let mut jxi = vec![0.0; n];
        jxi.extend_from_slice(&xi[..n]);
        let lhs = pair(&lg, &xi[..n], &eta[..n]);
        let rhs = pair(&lw, &jxi, &eta);
        lp = lp.max(rel((lhs - rhs).abs(), lhs.abs() + rhs.abs()));
    }
    out.push(lp);

    // |det ω| = det(g)²
    let dw = det_f64(&w).abs();
    let dg2 = det_f64(&g).powi(2);
    out.push(rel((dw - dg2).abs(), dw + dg2));

    // G(C, C) = 2E
    let gs = sasaki_metric(fs, p)?;
    out.push(rel((pair(&gs, &cv, &cv) - two_e).abs(), two_e.abs()));

    debug_assert_eq!(out.len(), IDENTITIES.len());
    Ok(out)
}

/// Runs the whole battery over the plan's samples.
pub fn run_identities(
    fs: &FinslerStructure,
    plan: &SamplePlan,
    tol: &IdentityTolerance,
) -> Result<IdentityReport, ClassifyError> {
    let samples = draw_samples(fs, plan)?;
    let reference = builtin_finsler("euclidean", &[], fs.dim())
        .expect("euclidean is always available")
        .structure;
    let points: Vec<&SlitPoint> = samples.points().map(|(_, p)| p).collect();
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| identity_residuals(fs, &reference, p, plan, i))
        .collect::<Result<_, _>>()?;
    let checks: Vec<IdentityCheck> = IDENTITIES
        .iter()
        .enumerate()
        .map(|(k, (name, statement, class))| {
            let max = rows.iter().map(|r| r[k]).fold(0.0_f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v) });
            let tolerance = match class {
                Tol::Rel => tol.rel_tol,
                Tol::Div => tol.divergence_tol,
                Tol::Independence => tol.independence_tol,
            };
            IdentityCheck {
                name: name.to_string(),
                statement: statement.to_string(),
                max_residual: max,
                tolerance,
                passed: max <= tolerance,
            }
        })
        .collect();
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(IdentityReport {
        report_version: REPORT_VERSION,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config: IdentityConfig {
            command: "identities".into(),
            finsler: fs.name.clone(),
            dim: fs.dim(),
            plan: plan.clone(),
            tolerances: *tol,
        },
        samples: points.len(),
        checks,
        all_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin_finsler;

    #[test]
    fn battery_holds_on_randers() {
        let m = builtin_finsler("randers", &[("b".into(), "0.3,0.1".into())], 2).unwrap();
        let mut plan = SamplePlan::for_region(&m.region, 5);
        plan.num_base_points = 4;
        let r = run_identities(&m.structure, &plan, &IdentityTolerance::default()).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{} residual {:e}", c.name, c.max_residual);
        }
        assert_eq!(r.samples, 20);
    }
}
