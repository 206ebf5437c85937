use crate::group::{in_open_arc, Gamma, LiftPoint, LiftedElement};

use super::{ApproxError, SearchBudget};

/// An open interval `(lo, hi)`. A periodic target also contains every
/// translate by an integer, which is harmless when looking for orders
/// because `abc` is central and shifts by one.
#[derive(Clone, Debug)]
pub struct Target {
    pub lo: LiftPoint,
    pub hi: LiftPoint,
    pub periodic: bool,
}

const MARGIN: f64 = 1e-7;

impl Target {
    pub fn contains(&self, y: &LiftPoint) -> bool {
        if self.periodic {
            in_open_arc(y.direction(), self.lo.direction(), self.hi.direction())
        } else {
            self.lo < *y && *y < self.hi
        }
    }

    /// Three-valued float test; `None` when too close to call.
    fn contains_f64(&self, g: &LiftedElement, p: &LiftPoint, p_angle: f64, p_pos: f64) -> Option<bool> {
        let (lo, hi) = (self.lo.to_f64(), self.hi.to_f64());
        let (y, lo, hi) = if self.periodic {
            let y = g.image_angle_f64(p_angle);
            let lo_a = lo - lo.floor();
            let len = hi - lo;
            let off = (y - lo_a).rem_euclid(1.0);
            let off = if off > 1.0 - MARGIN { off - 1.0 } else { off };
            (off, 0.0, len)
        } else {
            let _ = p;
            (g.apply_f64(p_pos)?, lo, hi)
        };
        if y > lo + MARGIN && y < hi - MARGIN {
            Some(true)
        } else if y < lo - MARGIN || y > hi + MARGIN {
            Some(false)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mover {
    pub element: LiftedElement,
    pub image: LiftPoint,
    pub candidates_examined: usize,
}

/// The first `g` in shortlex-by-length order with `ρ(g)(p) ∈ target` that
/// `accept` also approves.
pub fn find_point_mover(
    gamma: &Gamma,
    p: &LiftPoint,
    target: &Target,
    budget: &SearchBudget,
    mut accept: impl FnMut(&LiftedElement) -> bool,
) -> Result<Mover, ApproxError> {
    let (angle, pos) = (p.angle_f64(), p.to_f64());
    let mut examined = 0;
    for n in 0..=budget.max_word_length {
        for g in gamma.sphere(n) {
            examined += 1;
            if examined > budget.max_candidates {
                return Err(ApproxError::BudgetExhausted { candidates: budget.max_candidates, length: n });
            }
            if target.contains_f64(&g, p, angle, pos) == Some(false) {
                continue;
            }
            let y = g.apply(p);
            if target.contains(&y) && accept(&g) {
                return Ok(Mover { element: g, image: y, candidates_examined: examined });
            }
        }
    }
    Err(ApproxError::BudgetExhausted { candidates: examined, length: budget.max_word_length })
}
