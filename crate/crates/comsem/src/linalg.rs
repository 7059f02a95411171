//! Exact linear-system solving over the rationals with row provenance.
//!
//! The eliminator keeps a fully reduced (Gauss-Jordan) basis and tags every
//! derived row with the set of input rows it came from. When a constraint
//! reduces to `0 = c` with `c != 0`, that tag names an input subset that is
//! already jointly unsatisfiable — the replayable core of a refutation
//! certificate. Pivoting is first-nonzero and rows are processed in input
//! order, so identical systems eliminate identically.

use std::collections::BTreeSet;

use num::{BigRational, Zero};

/// Outcome of eliminating a full system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    /// Exactly one solution, in column order.
    Unique(Vec<BigRational>),
    /// Solvable, with `free_dimension` independent choices left open;
    /// `particular` is the solution with every free column at zero.
    Underdetermined {
        free_dimension: usize,
        particular: Vec<BigRational>,
    },
    /// Unsolvable; the listed input rows conflict on their own.
    Infeasible { witness_rows: BTreeSet<usize> },
}

#[derive(Debug, Clone)]
struct WorkRow {
    coeffs: Vec<BigRational>,
    rhs: BigRational,
    provenance: BTreeSet<usize>,
}

/// Incremental exact eliminator over a fixed column count.
///
/// Forward elimination only: stored rows are never rewritten, so each row's
/// provenance is exactly the derivation chain that produced it.
#[derive(Debug, Clone)]
pub struct Eliminator {
    cols: usize,
    rows: Vec<WorkRow>,
    /// pivot column -> index into `rows`.
    pivots: std::collections::BTreeMap<usize, usize>,
    added: usize,
    conflict: Option<BTreeSet<usize>>,
}

impl Eliminator {
    pub fn new(cols: usize) -> Self {
        Eliminator {
            cols,
            rows: Vec::new(),
            pivots: std::collections::BTreeMap::new(),
            added: 0,
            conflict: None,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows_added(&self) -> usize {
        self.added
    }

    pub fn has_conflict(&self) -> bool {
        self.conflict.is_some()
    }

    /// Reduce one constraint `coeffs . x = rhs` into the basis. Returns
    /// whether the row was independent (raised the rank). The first row
    /// that reduces to `0 = c != 0` latches its provenance as the conflict
    /// witness; later rows still eliminate normally.
    pub fn add_row(&mut self, coeffs: &[BigRational], rhs: &BigRational) -> bool {
        assert_eq!(coeffs.len(), self.cols, "row width mismatch");
        let mut coeffs = coeffs.to_vec();
        let mut rhs = rhs.clone();
        let mut provenance = BTreeSet::from([self.added]);
        self.added += 1;

        // Chase the leading column through existing pivots. Each step
        // strictly advances it, so this terminates within `cols` rounds.
        let pivot = loop {
            match coeffs.iter().position(|c| !c.is_zero()) {
                None => {
                    if !rhs.is_zero() && self.conflict.is_none() {
                        self.conflict = Some(provenance);
                    }
                    return false;
                }
                Some(lead) => match self.pivots.get(&lead) {
                    None => break lead,
                    Some(&idx) => {
                        let row = &self.rows[idx];
                        let factor = coeffs[lead].clone();
                        for (c, rc) in coeffs.iter_mut().zip(&row.coeffs) {
                            *c -= &factor * rc;
                        }
                        rhs -= &factor * &row.rhs;
                        provenance.extend(row.provenance.iter().copied());
                    }
                },
            }
        };

        let lead = coeffs[pivot].clone();
        for c in &mut coeffs {
            *c /= &lead;
        }
        rhs /= &lead;
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push(WorkRow {
            coeffs,
            rhs,
            provenance,
        });
        true
    }

    pub fn solve(&self) -> Solution {
        if let Some(witness_rows) = &self.conflict {
            return Solution::Infeasible {
                witness_rows: witness_rows.clone(),
            };
        }
        // Back-substitute by descending pivot column; free columns stay 0.
        let mut particular = vec![BigRational::zero(); self.cols];
        for (&pivot, &idx) in self.pivots.iter().rev() {
            let row = &self.rows[idx];
            let mut value = row.rhs.clone();
            for (j, c) in row.coeffs.iter().enumerate().skip(pivot + 1) {
                if !c.is_zero() {
                    value -= c * &particular[j];
                }
            }
            particular[pivot] = value;
        }
        let rank = self.rows.len();
        if rank == self.cols {
            Solution::Unique(particular)
        } else {
            Solution::Underdetermined {
                free_dimension: self.cols - rank,
                particular,
            }
        }
    }
}

/// Eliminate a whole system at once.
pub fn solve_system(rows: &[(Vec<BigRational>, BigRational)], cols: usize) -> Solution {
    let mut elim = Eliminator::new(cols);
    for (coeffs, rhs) in rows {
        elim.add_row(coeffs, rhs);
    }
    elim.solve()
}
