//! Dense two-phase simplex for `min c·x  s.t.  A x = b, x >= 0`.
//!
//! Pivoting follows Bland's rule throughout: the entering column is the
//! lowest-index column with a negative reduced cost, and ratio-test ties go to
//! the lowest-index basic variable. When phase 1 ends with a positive
//! objective, the phase-1 dual vector is returned as a Farkas certificate
//! `y` with `yᵀA <= 0` column-wise and `yᵀb > 0`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Phase-1 objective (sum of artificials) at or below which the system
    /// is declared feasible.
    pub feasibility_tol: f64,
    /// Reduced costs above `-pivot_tol` count as nonnegative; column entries
    /// below `pivot_tol` are not used as pivots.
    pub pivot_tol: f64,
    pub max_pivots: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            feasibility_tol: 1e-9,
            pivot_tol: 1e-11,
            max_pivots: 200_000,
        }
    }
}

/// An equality-form linear program. Rows of `a` are constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row duals `y = c_B B⁻¹` in the caller's row signs.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Infeasibility {
    /// Farkas vector over the caller's rows.
    pub certificate: Vec<f64>,
    /// Optimal phase-1 objective, i.e. the minimal L1 residual `|Ax - b|₁`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible(Infeasibility),
    Unbounded,
}

impl LinearProgram {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<LinearProgram> {
        if a.len() != b.len() {
            return Err(Error::Solver(format!("{} rows but {} right-hand sides", a.len(), b.len())));
        }
        if let Some(row) = a.iter().find(|r| r.len() != c.len()) {
            return Err(Error::Solver(format!("row of width {} but {} costs", row.len(), c.len())));
        }
        Ok(LinearProgram { a, b, c })
    }

    /// Pure feasibility problem (zero objective).
    pub fn feasibility(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<LinearProgram> {
        let n = a.first().map_or(0, Vec::len);
        LinearProgram::new(a, b, vec![0.0; n])
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn cols(&self) -> usize {
        self.c.len()
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        self.solve_with(&SimplexOptions::default())
    }

    pub fn solve_with(&self, opts: &SimplexOptions) -> Result<LpOutcome> {
        let mut t = Tableau::phase_one(self);
        t.run(self.cols(), opts)?;

        let residual = -t.rhs(t.m);
        if residual > opts.feasibility_tol {
            let certificate = (0..t.m)
                .map(|i| t.flip[i] * (1.0 - t.get(t.m, t.n + i)))
                .collect();
            return Ok(LpOutcome::Infeasible(Infeasibility {
                certificate,
                residual,
            }));
        }

        t.drive_out_artificials(opts.pivot_tol);
        t.load_costs(&self.c);
        if !t.run(self.cols(), opts)? {
            return Ok(LpOutcome::Unbounded);
        }

        let mut x = vec![0.0; self.cols()];
        for (r, &v) in t.basis.iter().enumerate() {
            if v < t.n {
                x[v] = t.rhs(r).max(0.0);
            }
        }
        let objective = self.c.iter().zip(&x).map(|(c, x)| c * x).sum();
        let duals = (0..t.m).map(|i| -t.flip[i] * t.get(t.m, t.n + i)).collect();
        Ok(LpOutcome::Optimal(LpSolution {
            x,
            objective,
            duals,
            pivots: t.pivots,
        }))
    }
}

/// `(m + 1) x (n + m + 1)` tableau; the last row holds reduced costs and the
/// last column the right-hand side (negated objective in the cost row).
struct Tableau {
    m: usize,
    n: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    flip: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    fn phase_one(lp: &LinearProgram) -> Tableau {
        let m = lp.rows();
        let n = lp.cols();
        let width = n + m + 1;
        let mut data = vec![0.0; (m + 1) * width];
        let mut flip = vec![1.0; m];
        for i in 0..m {
            let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
            flip[i] = sign;
            let row = &mut data[i * width..(i + 1) * width];
            for (dst, &src) in row[..n].iter_mut().zip(&lp.a[i]) {
                *dst = sign * src;
            }
            row[n + i] = 1.0;
            row[width - 1] = sign * lp.b[i];
        }
        for i in 0..m {
            for j in 0..n {
                data[m * width + j] -= data[i * width + j];
            }
            data[m * width + width - 1] -= data[i * width + width - 1];
        }
        Tableau {
            m,
            n,
            width,
            data,
            basis: (n..n + m).collect(),
            flip,
            pivots: 0,
        }
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width + self.width - 1]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let inv = 1.0 / self.data[row * w + col];
        for v in &mut self.data[row * w..(row + 1) * w] {
            *v *= inv;
        }
        self.data[row * w + col] = 1.0;
        let (before, rest) = self.data.split_at_mut(row * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        let eliminate = |other: &mut [f64]| {
            for chunk in other.chunks_exact_mut(w) {
                let factor = chunk[col];
                if factor != 0.0 {
                    for (x, p) in chunk.iter_mut().zip(pivot_row.iter()) {
                        *x -= factor * p;
                    }
                    chunk[col] = 0.0;
                }
            }
        };
        eliminate(before);
        eliminate(after);
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Runs Bland pivots with entering candidates restricted to
    /// `0..eligible`. Returns `false` on an unbounded ray.
    fn run(&mut self, eligible: usize, opts: &SimplexOptions) -> Result<bool> {
        loop {
            let cost_row = self.m * self.width;
            let entering = (0..eligible).find(|&j| self.data[cost_row + j] < -opts.pivot_tol);
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let a = self.get(r, col);
                if a <= opts.pivot_tol {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, best)) => {
                        if ratio < best - 1e-12 || (ratio <= best + 1e-12 && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, best))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Ok(false);
            };
            if self.pivots >= opts.max_pivots {
                return Err(Error::Solver(format!("pivot limit {} reached", opts.max_pivots)));
            }
            self.pivot(row, col);
        }
    }

    /// Replaces zero-level artificial basics by structural columns where the
    /// row allows it; rows with no structural entry are redundant and keep
    /// their artificial at zero.
    fn drive_out_artificials(&mut self, pivot_tol: f64) {
        for r in 0..self.m {
            if self.basis[r] < self.n {
                continue;
            }
            let best = (0..self.n)
                .map(|j| (j, self.get(r, j).abs()))
                .filter(|&(_, v)| v > pivot_tol)
                .max_by(|x, y| x.1.total_cmp(&y.1));
            if let Some((j, _)) = best {
                self.pivot(r, j);
            }
        }
    }

    fn load_costs(&mut self, c: &[f64]) {
        let w = self.width;
        let cost_row = self.m * w;
        for v in &mut self.data[cost_row..] {
            *v = 0.0;
        }
        self.data[cost_row..cost_row + self.n].copy_from_slice(c);
        for r in 0..self.m {
            let bv = self.basis[r];
            let cb = if bv < self.n { c[bv] } else { 0.0 };
            if cb != 0.0 {
                for j in 0..w {
                    self.data[cost_row + j] -= cb * self.data[r * w + j];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(outcome: LpOutcome) -> LpSolution {
        match outcome {
            LpOutcome::Optimal(s) => s,
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn small_optimum() {
        // max x + y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let lp = LinearProgram::new(
            vec![vec![1.0, 2.0, 1.0, 0.0], vec![3.0, 1.0, 0.0, 1.0]],
            vec![4.0, 6.0],
            vec![-1.0, -1.0, 0.0, 0.0],
        )
        .unwrap();
        let s = optimal(lp.solve().unwrap());
        assert!((s.x[0] - 1.6).abs() < 1e-12);
        assert!((s.x[1] - 1.2).abs() < 1e-12);
        assert!((s.objective + 2.8).abs() < 1e-12);
        // strong duality
        let dual_obj: f64 = s.duals.iter().zip([4.0, 6.0]).map(|(y, b)| y * b).sum();
        assert!((dual_obj - s.objective).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_rows() {
        // -x - y = -2, x - y = 0  => x = y = 1
        let lp = LinearProgram::feasibility(vec![vec![-1.0, -1.0], vec![1.0, -1.0]], vec![-2.0, 0.0]).unwrap();
        let s = optimal(lp.solve().unwrap());
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_rows() {
        // x + y = 1 stated twice, plus 2x + 2y = 2
        let lp = LinearProgram::new(
            vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![2.0, 2.0]],
            vec![1.0, 1.0, 2.0],
            vec![1.0, 2.0],
        )
        .unwrap();
        let s = optimal(lp.solve().unwrap());
        assert_eq!(s.x, vec![1.0, 0.0]);
    }

    #[test]
    fn farkas_certificate() {
        // x + y = 1 and x + y = 2 cannot both hold
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let b = vec![1.0, 2.0];
        let lp = LinearProgram::feasibility(a.clone(), b.clone()).unwrap();
        let LpOutcome::Infeasible(inf) = lp.solve().unwrap() else {
            panic!("expected infeasible");
        };
        for j in 0..2 {
            let col: f64 = (0..2).map(|i| inf.certificate[i] * a[i][j]).sum();
            assert!(col <= 1e-12);
        }
        let yb: f64 = inf.certificate.iter().zip(&b).map(|(y, b)| y * b).sum();
        assert!(yb > 0.0);
        assert!((inf.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded() {
        // min -x s.t. x - y = 0
        let lp = LinearProgram::new(vec![vec![1.0, -1.0]], vec![0.0], vec![-1.0, 0.0]).unwrap();
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn shape_checks() {
        assert!(LinearProgram::new(vec![vec![1.0]], vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(LinearProgram::new(vec![vec![1.0, 2.0]], vec![1.0], vec![0.0]).is_err());
    }
}
