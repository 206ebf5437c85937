//! Partial multiplication tables on finite element sets.

use std::collections::HashMap;

use crate::group::{ElementKey, LiftedElement};

/// For a finite list `F`, the index in `F` of each product `F[i]·F[j]` and of
/// each inverse, when present. Products are located with a floating-point
/// matrix lookup and then confirmed exactly.
pub struct ProductTable {
    elements: Vec<LiftedElement>,
    index: HashMap<ElementKey, usize>,
    products: Vec<Vec<Option<usize>>>,
    inverses: Vec<Option<usize>>,
}

const GRID: f64 = 1e3;

fn cell(m: &[[f64; 2]; 2]) -> (i64, i64) {
    ((m[0][0].abs() * GRID).round() as i64, (m[0][1].abs() * GRID).round() as i64)
}

fn close_projectively(m: &[[f64; 2]; 2], n: &[[f64; 2]; 2]) -> bool {
    let flat = |x: &[[f64; 2]; 2]| [x[0][0], x[0][1], x[1][0], x[1][1]];
    let (a, b) = (flat(m), flat(n));
    let scale = 1e-7 * (1.0 + a.iter().map(|x| x.abs()).fold(0.0, f64::max));
    let same = a.iter().zip(&b).all(|(x, y)| (x - y).abs() < scale);
    let opposite = a.iter().zip(&b).all(|(x, y)| (x + y).abs() < scale);
    same || opposite
}

impl ProductTable {
    pub fn new(elements: &[LiftedElement]) -> ProductTable {
        let index: HashMap<ElementKey, usize> = elements.iter().enumerate().map(|(i, g)| (g.key().clone(), i)).collect();
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, g) in elements.iter().enumerate() {
            grid.entry(cell(g.approx())).or_default().push(i);
        }
        let locate = |prod: &[[f64; 2]; 2], exact: &dyn Fn() -> LiftedElement| -> Option<usize> {
            let (x, y) = cell(prod);
            let mut hit = false;
            'outer: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(ids) = grid.get(&(x + dx, y + dy)) {
                        if ids.iter().any(|&k| close_projectively(elements[k].approx(), prod)) {
                            hit = true;
                            break 'outer;
                        }
                    }
                }
            }
            if !hit {
                return None;
            }
            index.get(exact().key()).copied()
        };
        let products = elements
            .iter()
            .map(|g| {
                let m = g.approx();
                elements
                    .iter()
                    .map(|h| {
                        let n = h.approx();
                        let p = [
                            [m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]],
                            [m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]],
                        ];
                        locate(&p, &|| g.compose(h))
                    })
                    .collect()
            })
            .collect();
        let inverses = elements.iter().map(|g| index.get(g.inverse().key()).copied()).collect();
        ProductTable { elements: elements.to_vec(), index, products, inverses }
    }

    pub fn elements(&self) -> &[LiftedElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, g: &LiftedElement) -> Option<usize> {
        self.index.get(g.key()).copied()
    }

    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        self.products[i][j]
    }

    pub fn inverse(&self, i: usize) -> Option<usize> {
        self.inverses[i]
    }
}
