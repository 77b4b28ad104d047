//! Seeded sampling of slit points, and random polynomial fields and sections
//! for the property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exprlang::{BinOp, Expr};
use crate::geometry::{check_nondegenerate, metric, FinslerStructure, SlitPoint};
use crate::lifts::{ExprField, ExprSection, ExprTmField};
use crate::models::SafeRegion;

#[derive(Debug, Clone, Error)]
pub enum SampleError {
    #[error("invalid sample plan: {0}")]
    InvalidPlan(String),
    #[error("sampling exhausted after {attempts} draws: {accepted} of {requested} points accepted")]
    Exhausted {
        attempts: usize,
        accepted: usize,
        requested: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub num_base_points: usize,
    pub fibre_points_per_base: usize,
    pub x_box: Vec<(f64, f64)>,
    pub y_box: Vec<(f64, f64)>,
    /// Lower bound on every `|y^i|`.
    pub min_abs_y: f64,
    /// Draw budget per accepted point.
    pub max_attempts: usize,
}

impl SamplePlan {
    /// 20 base points with 5 fibre points each over the region's boxes.
    pub fn for_region(region: &SafeRegion, seed: u64) -> SamplePlan {
        SamplePlan {
            seed,
            num_base_points: 20,
            fibre_points_per_base: 5,
            x_box: region.x.clone(),
            y_box: region.y.clone(),
            min_abs_y: region.min_abs_y,
            max_attempts: 200,
        }
    }

    pub fn dim(&self) -> usize {
        self.x_box.len()
    }

    pub fn validate(&self) -> Result<(), SampleError> {
        let bad = |m: String| Err(SampleError::InvalidPlan(m));
        if self.fibre_points_per_base < 3 {
            return bad(format!(
                "fibre_points_per_base must be at least 3, got {}",
                self.fibre_points_per_base
            ));
        }
        if self.num_base_points == 0 {
            return bad("num_base_points must be positive".into());
        }
        if self.x_box.len() != self.y_box.len() || self.x_box.is_empty() {
            return bad("x and y boxes must have the same positive dimension".into());
        }
        for (a, b) in self.x_box.iter().chain(&self.y_box) {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return bad(format!("interval [{a}, {b}] is not valid"));
            }
        }
        let fibre_ok = self
            .y_box
            .iter()
            .all(|(a, b)| b.abs().max(a.abs()) > self.min_abs_y);
        if !fibre_ok {
            return bad("fibre box lies inside the excluded band |y_i| < min_abs_y".into());
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be positive".into());
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Independent stream for auxiliary draws at sample `index`.
    pub fn sample_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_stream(index as u64 + 1);
        rng
    }
}

/// Accepted slit points grouped by base point.
#[derive(Debug, Clone)]
pub struct Samples {
    pub groups: Vec<Vec<SlitPoint>>,
    pub rejected: usize,
}

impl Samples {
    pub fn points(&self) -> impl Iterator<Item = (usize, &SlitPoint)> {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(b, g)| g.iter().map(move |p| (b, p)))
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn uniform(rng: &mut ChaCha8Rng, (a, b): (f64, f64)) -> f64 {
    if a == b {
        a
    } else {
        rng.gen_range(a..=b)
    }
}

/// Whether `p` is usable: metric evaluable and nondegenerate, `E` not
/// vanishing relative to the metric scale.
pub fn admissible(fs: &FinslerStructure, p: &SlitPoint) -> bool {
    let Ok(g) = metric(fs, p) else {
        return false;
    };
    if check_nondegenerate(fs, p, &g).is_err() {
        return false;
    }
    let Ok(e) = fs.energy(p) else {
        return false;
    };
    let y2: f64 = p.y.iter().map(|v| v * v).sum();
    let gmax = g.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    e.is_finite() && 2.0 * e.abs() > 1e-8 * gmax * y2
}

/// Draws the plan's points in a fixed order from the seeded stream.
pub fn draw_samples(fs: &FinslerStructure, plan: &SamplePlan) -> Result<Samples, SampleError> {
    plan.validate()?;
    let n = plan.dim();
    if n != fs.dim() {
        return Err(SampleError::InvalidPlan(format!(
            "plan has dimension {n}, structure has {}",
            fs.dim()
        )));
    }
    let mut rng = plan.rng();
    let requested = plan.num_base_points * plan.fibre_points_per_base;
    let budget = plan.max_attempts * requested;
    let y_scale = plan
        .y_box
        .iter()
        .fold(0.0_f64, |m, (a, b)| m.max(a.abs()).max(b.abs()));
    let mut attempts = 0;
    let mut rejected = 0;
    let mut groups = Vec::with_capacity(plan.num_base_points);
    let exhausted = |accepted: usize, attempts: usize| SampleError::Exhausted {
        attempts,
        accepted,
        requested,
    };
    while groups.len() < plan.num_base_points {
        let x: Vec<f64> = plan.x_box.iter().map(|iv| uniform(&mut rng, *iv)).collect();
        let mut group = Vec::with_capacity(plan.fibre_points_per_base);
        let mut local = 0;
        while group.len() < plan.fibre_points_per_base && local < plan.max_attempts {
            local += 1;
            attempts += 1;
            let y: Vec<f64> = plan.y_box.iter().map(|iv| uniform(&mut rng, *iv)).collect();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ok = norm > 1e-3 * y_scale
                && y.iter().all(|v| v.abs() >= plan.min_abs_y)
                && SlitPoint::new(x.clone(), y.clone())
                    .map(|p| {
                        let good = admissible(fs, &p);
                        if good {
                            group.push(p);
                        }
                        good
                    })
                    .unwrap_or(false);
            if !ok {
                rejected += 1;
            }
        }
        if group.len() == plan.fibre_points_per_base {
            groups.push(group);
        } else {
            rejected += group.len();
        }
        if groups.len() < plan.num_base_points && attempts >= budget {
            let accepted = groups.iter().map(Vec::len).sum();
            return Err(exhausted(accepted, attempts));
        }
    }
    Ok(Samples { groups, rejected })
}

fn coeff(rng: &mut ChaCha8Rng) -> Expr {
    let c = (rng.gen_range(-1.0..1.0_f64) * 1000.0).round() / 1000.0;
    Expr::num(c)
}

fn term(c: Expr, vars: Vec<Expr>) -> Expr {
    vars.into_iter().fold(c, |acc, v| Expr::binary(BinOp::Mul, acc, v))
}

fn sum(terms: Vec<Expr>) -> Expr {
    let mut it = terms.into_iter();
    let first = it.next().unwrap_or(Expr::Num(0.0));
    it.fold(first, |acc, t| Expr::binary(BinOp::Add, acc, t))
}

/// Random polynomial of degree two in the given variables.
pub fn random_quadratic(rng: &mut ChaCha8Rng, vars: &[Expr]) -> Expr {
    let mut terms = vec![coeff(rng)];
    for v in vars {
        terms.push(term(coeff(rng), vec![v.clone()]));
    }
    for (i, v) in vars.iter().enumerate() {
        for w in &vars[i..] {
            terms.push(term(coeff(rng), vec![v.clone(), w.clone()]));
        }
    }
    sum(terms)
}

fn base_vars(n: usize) -> Vec<Expr> {
    (1..=n).map(Expr::x).collect()
}

fn all_vars(n: usize) -> Vec<Expr> {
    let mut v = base_vars(n);
    v.extend((1..=n).map(Expr::y));
    v
}

/// Random quadratic base vector field.
pub fn random_base_field(rng: &mut ChaCha8Rng, n: usize) -> ExprField {
    let vars = base_vars(n);
    ExprField::from_components((0..n).map(|_| random_quadratic(rng, &vars)).collect())
}

/// Random section, quadratic in `(x, y)`.
pub fn random_section(rng: &mut ChaCha8Rng, n: usize) -> ExprSection {
    let vars = all_vars(n);
    ExprSection((0..n).map(|_| random_quadratic(rng, &vars)).collect())
}

/// Random field on the tangent bundle, quadratic in `(x, y)`.
pub fn random_tm_field(rng: &mut ChaCha8Rng, n: usize) -> ExprTmField {
    let vars = all_vars(n);
    ExprTmField((0..2 * n).map(|_| random_quadratic(rng, &vars)).collect())
}

/// Random vector with entries in `[-1, 1]`.
pub fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// A point drawn like [`draw_samples`] would, for property suites that only
/// need individual points.
pub fn draw_points(fs: &FinslerStructure, plan: &SamplePlan) -> Result<Vec<SlitPoint>, SampleError> {
    Ok(draw_samples(fs, plan)?.points().map(|(_, p)| p.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin_finsler;

    #[test]
    fn draws_are_reproducible() {
        let m = builtin_finsler("randers", &[("b".into(), "0.3,0".into())], 2).unwrap();
        let plan = SamplePlan::for_region(&m.region, 11);
        let a = draw_points(&m.structure, &plan).unwrap();
        let b = draw_points(&m.structure, &plan).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        let other = draw_points(&m.structure, &SamplePlan { seed: 12, ..plan }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn groups_share_base_points() {
        let m = builtin_finsler("quartic", &[], 2).unwrap();
        let s = draw_samples(&m.structure, &SamplePlan::for_region(&m.region, 3)).unwrap();
        for g in &s.groups {
            assert!(g.iter().all(|p| p.x == g[0].x));
            assert!(g.iter().all(|p| p.y.iter().all(|v| v.abs() >= 0.1)));
        }
    }

    #[test]
    fn plan_validation() {
        let m = builtin_finsler("euclidean", &[], 2).unwrap();
        let mut plan = SamplePlan::for_region(&m.region, 0);
        plan.fibre_points_per_base = 2;
        assert!(matches!(plan.validate(), Err(SampleError::InvalidPlan(_))));
    }

    #[test]
    fn degenerate_structures_exhaust_sampling() {
        let fs = FinslerStructure::from_energy(
            2,
            crate::exprlang::parse("0.5*y1^2", 2, true).unwrap(),
            "rank one",
        );
        let m = builtin_finsler("euclidean", &[], 2).unwrap();
        let mut plan = SamplePlan::for_region(&m.region, 0);
        plan.max_attempts = 5;
        assert!(matches!(draw_samples(&fs, &plan), Err(SampleError::Exhausted { .. })));
    }
}
