//! Sparse symmetric linear algebra: assembly-friendly storage, a direct
//! profile Cholesky solver with reverse Cuthill-McKee ordering, incomplete-
//! Cholesky preconditioned conjugate gradients for systems too large to
//! factor, and the matrix diagnostics reported alongside benchmark results
//! (nnz density and 2-norm condition estimates).

use std::io::Write;

use crate::error::Error;
use crate::util::SplitMix64;

/// Relative residual guaranteed by [`solve`].
pub const SOLVE_TOLERANCE: f64 = 1e-10;
/// Conjugate-gradient convergence target.
pub const CG_TOLERANCE: f64 = 1e-12;
/// Relative eigenvalue-change stopping criterion for power iterations.
pub const EIG_TOLERANCE: f64 = 1e-4;
/// Iteration cap for the power/inverse-power eigenvalue estimators.
pub const EIG_MAX_ITERATIONS: usize = 5000;
/// Profile-entry budget above which the direct factorization falls back to
/// conjugate gradients (8 bytes per entry; 3e7 entries is 240 MB).
const PROFILE_LIMIT: usize = 30_000_000;

/// Compressed-row sparse matrix.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from triplets, summing duplicates. The stable sort keeps the
    /// per-key insertion order, so the two mirrored entries of a symmetric
    /// pair are summed in the same order and stay bit-identical. Entries that
    /// sum to exactly zero are dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut it = triplets.into_iter().peekable();
        while let Some((i, j, v)) = it.next() {
            let mut sum = v;
            while let Some(&(i2, j2, v2)) = it.peek() {
                if i2 == i && j2 == j {
                    sum += v2;
                    it.next();
                } else {
                    break;
                }
            }
            if sum != 0.0 {
                row_ptr[i + 1] += 1;
                col_idx.push(j);
                values.push(sum);
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
    }

    /// Exact structural and numerical symmetry (bit equality of paired
    /// entries). Assembly adds symmetric pairs together, so this holds for
    /// every assembled system.
    pub fn is_bit_symmetric(&self) -> bool {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if self.get(j, i).to_bits() != v.to_bits() {
                    return false;
                }
            }
        }
        true
    }
}

/// Physical entity behind an unknown of a discrete system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofEntity {
    MatrixCell(usize),
    /// Fracture cell: fracture id and running element index along it.
    FractureCell { fracture: usize, element: usize },
    /// Fracture-intersection cell at a mesh vertex (kept only without
    /// star-delta elimination).
    Intersection { vertex: usize },
}

/// Symmetric positive definite sparse system with its right-hand side and
/// the map from unknown index to physical entity.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub entities: Vec<DofEntity>,
}

impl SparseSystem {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }
}

/// Triplet accumulator for symmetric assembly.
#[derive(Clone, Debug)]
pub struct SystemBuilder {
    n: usize,
    triplets: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
    entities: Vec<DofEntity>,
}

impl SystemBuilder {
    pub fn new(entities: Vec<DofEntity>) -> Self {
        let n = entities.len();
        SystemBuilder {
            n,
            triplets: Vec::new(),
            rhs: vec![0.0; n],
            entities,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Two-point connection of transmissibility `t` between unknowns `i`, `j`.
    pub fn add_connection(&mut self, i: usize, j: usize, t: f64) {
        debug_assert!(i != j && i < self.n && j < self.n);
        self.triplets.push((i, i, t));
        self.triplets.push((j, j, t));
        self.triplets.push((i, j, -t));
        self.triplets.push((j, i, -t));
    }

    /// Dirichlet connection eliminated into the right-hand side: keeps the
    /// system SPD instead of replacing the row.
    pub fn add_dirichlet(&mut self, i: usize, t: f64, value: f64) {
        debug_assert!(i < self.n);
        self.triplets.push((i, i, t));
        self.rhs[i] += t * value;
    }

    pub fn add_rhs(&mut self, i: usize, q: f64) {
        self.rhs[i] += q;
    }

    pub fn build(self) -> SparseSystem {
        SparseSystem {
            matrix: CsrMatrix::from_triplets(self.n, self.triplets),
            rhs: self.rhs,
            entities: self.entities,
        }
    }
}

/// How a solution was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolveMethod {
    Cholesky,
    ConjugateGradient { iterations: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct SolveReport {
    pub method: SolveMethod,
    pub relative_residual: f64,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn relative_residual(m: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let mut r = vec![0.0; m.n()];
    m.matvec(x, &mut r);
    for i in 0..m.n() {
        r[i] = b[i] - r[i];
    }
    let nb = norm2(b);
    if nb == 0.0 {
        norm2(&r)
    } else {
        norm2(&r) / nb
    }
}

/// Solves an SPD system to a relative residual of [`SOLVE_TOLERANCE`].
/// Direct profile Cholesky by default; conjugate gradients with incomplete-
/// Cholesky preconditioning when the factorization would exceed its memory
/// budget.
pub fn solve(sys: &SparseSystem) -> Result<(Vec<f64>, SolveReport), Error> {
    let factor = Factorization::new(&sys.matrix)?;
    let mut x = factor.solve_vec(&sys.rhs)?;
    let mut rel = relative_residual(&sys.matrix, &x, &sys.rhs);
    // iterative refinement recovers the last digits on ill-conditioned
    // systems (graded equi-dimensional grids with strong contrasts)
    for _ in 0..4 {
        if rel <= SOLVE_TOLERANCE {
            break;
        }
        let n = sys.n();
        let mut r = vec![0.0; n];
        sys.matrix.matvec(&x, &mut r);
        for i in 0..n {
            r[i] = sys.rhs[i] - r[i];
        }
        let dx = factor.solve_vec(&r)?;
        for i in 0..n {
            x[i] += dx[i];
        }
        rel = relative_residual(&sys.matrix, &x, &sys.rhs);
        if std::env::var_os("FRACKBENCH_DEBUG_SOLVE").is_some() {
            eprintln!(
                "refine: raw {rel:.3e}, scaled {:.3e}",
                factor.scaled_residual(&x, &sys.rhs)
            );
        }
    }
    // transmissibility contrasts of 1e8 and beyond push the f64 evaluation
    // floor of the raw 2-norm residual above the tolerance even for the
    // exact solution; the equilibrated residual is the meaningful metric
    // there and is held to the same bound
    if rel > SOLVE_TOLERANCE {
        let scaled = factor.scaled_residual(&x, &sys.rhs);
        if scaled > SOLVE_TOLERANCE {
            return Err(Error::Solver(format!(
                "solution residual {rel:.3e} (equilibrated {scaled:.3e}) exceeds tolerance {SOLVE_TOLERANCE:.1e}"
            )));
        }
    }
    let method = if factor.is_direct() {
        SolveMethod::Cholesky
    } else {
        SolveMethod::ConjugateGradient {
            iterations: factor.last_cg_iterations(),
        }
    };
    Ok((
        x,
        SolveReport {
            method,
            relative_residual: rel,
        },
    ))
}

/// Direct or iterative solve backend, reusable across right-hand sides
/// (inverse power iteration solves against the same operator repeatedly).
/// The operator is symmetrically Jacobi-equilibrated before factorization;
/// transmissibility contrasts of many orders of magnitude would otherwise
/// push the attainable residual above tolerance.
pub struct Factorization {
    scale: Vec<f64>,
    scaled: CsrMatrix,
    backend: Backend,
}

enum Backend {
    Direct(EnvelopeCholesky),
    Iterative(IncompleteCholesky, std::cell::Cell<usize>),
}

impl Factorization {
    pub fn new(m: &CsrMatrix) -> Result<Self, Error> {
        let n = m.n();
        let mut scale = vec![0.0; n];
        for i in 0..n {
            let d = m.get(i, i);
            if !(d > 0.0) {
                return Err(Error::Solver(format!(
                    "diagonal entry {d:.3e} at unknown {i} is not positive; system is not SPD"
                )));
            }
            scale[i] = 1.0 / d.sqrt();
        }
        let mut triplets = Vec::with_capacity(m.nnz());
        for i in 0..n {
            for (j, v) in m.row(i) {
                triplets.push((i, j, v * scale[i] * scale[j]));
            }
        }
        let scaled = CsrMatrix::from_triplets(n, triplets);

        let perm = rcm_ordering(&scaled);
        let profile = profile_size(&scaled, &perm);
        let backend = if profile <= PROFILE_LIMIT {
            Backend::Direct(EnvelopeCholesky::new(&scaled, perm)?)
        } else {
            Backend::Iterative(IncompleteCholesky::new(&scaled)?, std::cell::Cell::new(0))
        };
        Ok(Factorization {
            scale,
            scaled,
            backend,
        })
    }

    pub fn is_direct(&self) -> bool {
        matches!(self.backend, Backend::Direct(_))
    }

    pub fn last_cg_iterations(&self) -> usize {
        match &self.backend {
            Backend::Direct(_) => 0,
            Backend::Iterative(_, iters) => iters.get(),
        }
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>, Error> {
        let n = self.scale.len();
        let bs: Vec<f64> = (0..n).map(|i| b[i] * self.scale[i]).collect();
        let mut x = match &self.backend {
            Backend::Direct(ch) => ch.solve(&bs),
            Backend::Iterative(ic, iters) => {
                let (x, it) = pcg(&self.scaled, ic, &bs)?;
                iters.set(it);
                x
            }
        };
        for i in 0..n {
            x[i] *= self.scale[i];
        }
        Ok(x)
    }

    /// Relative residual of the symmetrically equilibrated system.
    pub fn scaled_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let n = self.scale.len();
        let bs: Vec<f64> = (0..n).map(|i| b[i] * self.scale[i]).collect();
        let xs: Vec<f64> = (0..n).map(|i| x[i] / self.scale[i]).collect();
        relative_residual(&self.scaled, &xs, &bs)
    }
}

// ---------------------------------------------------------------------------
// Reverse Cuthill-McKee ordering and profile Cholesky
// ---------------------------------------------------------------------------

/// Reverse Cuthill-McKee permutation (new index -> old index), started from a
/// pseudo-peripheral vertex found by repeated BFS.
pub fn rcm_ordering(m: &CsrMatrix) -> Vec<usize> {
    let n = m.n();
    let degree: Vec<usize> = (0..n).map(|i| m.row(i).count()).collect();

    let bfs = |start: usize, visited: &mut Vec<bool>, order: &mut Vec<usize>| -> usize {
        let from = order.len();
        order.push(start);
        visited[start] = true;
        let mut head = from;
        let mut last = start;
        while head < order.len() {
            let u = order[head];
            head += 1;
            last = u;
            let mut nbrs: Vec<usize> = m
                .row(u)
                .map(|(j, _)| j)
                .filter(|&j| j != u && !visited[j])
                .collect();
            nbrs.sort_by_key(|&j| degree[j]);
            for j in nbrs {
                if !visited[j] {
                    visited[j] = true;
                    order.push(j);
                }
            }
        }
        last
    };

    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // double sweep for a pseudo-peripheral start
        let mut probe_visited = visited.clone();
        let mut probe = Vec::new();
        let far = bfs(seed, &mut probe_visited, &mut probe);
        bfs(far, &mut visited, &mut order);
    }
    order.reverse();
    order
}

/// Number of stored entries of a profile factorization under `perm`.
fn profile_size(m: &CsrMatrix, perm: &[usize]) -> usize {
    let n = m.n();
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut total = 0usize;
    for new_i in 0..n {
        let old_i = perm[new_i];
        let first = m
            .row(old_i)
            .map(|(j, _)| inv[j])
            .filter(|&j| j <= new_i)
            .min()
            .unwrap_or(new_i);
        total += new_i - first + 1;
    }
    total
}

/// Profile (envelope) Cholesky factorization of a permuted SPD matrix.
pub struct EnvelopeCholesky {
    n: usize,
    perm: Vec<usize>,
    /// start-of-row column index in the envelope
    first: Vec<usize>,
    /// row start offsets into `values`
    offsets: Vec<usize>,
    /// factor rows, columns first[i]..=i
    values: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn new(m: &CsrMatrix, perm: Vec<usize>) -> Result<Self, Error> {
        let n = m.n();
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first = vec![0usize; n];
        for new_i in 0..n {
            let old_i = perm[new_i];
            first[new_i] = m
                .row(old_i)
                .map(|(j, _)| inv[j])
                .filter(|&j| j <= new_i)
                .min()
                .unwrap_or(new_i);
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + (i - first[i] + 1);
        }
        let mut values = vec![0.0; offsets[n]];
        for new_i in 0..n {
            let old_i = perm[new_i];
            for (old_j, v) in m.row(old_i) {
                let new_j = inv[old_j];
                if new_j <= new_i {
                    values[offsets[new_i] + (new_j - first[new_i])] = v;
                }
            }
        }

        // row-oriented profile factorization
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut sum = values[offsets[i] + (j - fi)];
                if lo < j {
                    let a = &values[offsets[i] + (lo - fi)..offsets[i] + (j - fi)];
                    let b = &values[offsets[j] + (lo - fj)..offsets[j] + (j - fj)];
                    sum -= dot(a, b);
                }
                let djj = values[offsets[j] + (j - fj)];
                values[offsets[i] + (j - fi)] = sum / djj;
            }
            let mut diag = values[offsets[i] + (i - fi)];
            if i > fi {
                let a = &values[offsets[i]..offsets[i] + (i - fi)];
                diag -= dot(a, a);
            }
            if !(diag > 0.0) {
                return Err(Error::Solver(format!(
                    "Cholesky pivot {diag:.3e} at unknown {} is not positive; system is not SPD",
                    perm[i]
                )));
            }
            values[offsets[i] + (i - fi)] = diag.sqrt();
        }

        Ok(EnvelopeCholesky {
            n,
            perm,
            first,
            offsets,
            values,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = b[self.perm[i]];
        }
        // forward: L y' = y
        for i in 0..n {
            let fi = self.first[i];
            let mut sum = y[i];
            if i > fi {
                let row = &self.values[self.offsets[i]..self.offsets[i] + (i - fi)];
                sum -= dot(row, &y[fi..i]);
            }
            y[i] = sum / self.values[self.offsets[i] + (i - fi)];
        }
        // backward: L^T x' = y'
        for i in (0..n).rev() {
            let fi = self.first[i];
            let lii = self.values[self.offsets[i] + (i - fi)];
            let xi = y[i] / lii;
            y[i] = xi;
            if i > fi {
                for j in fi..i {
                    y[j] -= self.values[self.offsets[i] + (j - fi)] * xi;
                }
            }
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }
}

// ---------------------------------------------------------------------------
// Incomplete-Cholesky preconditioned conjugate gradients
// ---------------------------------------------------------------------------

/// IC(0)-preconditioned conjugate gradients; returns the solution and the
/// iteration count.
fn pcg(matrix: &CsrMatrix, ic: &IncompleteCholesky, b: &[f64]) -> Result<(Vec<f64>, usize), Error> {
    let n = matrix.n();
    let max_iter = 10 * n;
    let nb = norm2(b);
    if nb == 0.0 {
        return Ok((vec![0.0; n], 0));
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    ic.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        matrix.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Solver(format!(
                "conjugate gradients found a non-positive curvature direction (p^T A p = {pap:.3e}); system is not SPD"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm2(&r) <= CG_TOLERANCE * nb {
            return Ok((x, it + 1));
        }
        ic.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    // tolerate round-off stalls between CG_TOLERANCE and the solve contract
    if relative_residual(matrix, &x, b) <= SOLVE_TOLERANCE {
        return Ok((x, max_iter));
    }
    Err(Error::Solver(format!(
        "conjugate gradients did not reach {CG_TOLERANCE:.1e} within {max_iter} iterations"
    )))
}

struct IncompleteCholesky {
    // lower-triangular CSR factor (including diagonal)
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl IncompleteCholesky {
    fn new(m: &CsrMatrix) -> Result<Self, Error> {
        let n = m.n();
        // lower triangle structure
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::new();
        for i in 0..n {
            for (j, _) in m.row(i) {
                if j <= i {
                    col_idx.push(j);
                    row_ptr[i + 1] += 1;
                }
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }

        let mean_diag = (0..n).map(|i| m.get(i, i)).sum::<f64>() / n as f64;
        let mut shift = 0.0;
        'attempt: for _ in 0..12 {
            let mut values = vec![0.0; col_idx.len()];
            for i in 0..n {
                for k in row_ptr[i]..row_ptr[i + 1] {
                    values[k] = m.get(i, col_idx[k]);
                }
                let dk = row_ptr[i + 1] - 1;
                values[dk] += shift;
            }
            let mut diag_pos = vec![0usize; n];
            for i in 0..n {
                diag_pos[i] = row_ptr[i + 1] - 1;
            }
            let mut ok = true;
            for i in 0..n {
                for k in row_ptr[i]..row_ptr[i + 1] {
                    let j = col_idx[k];
                    // dot of rows i and j over shared columns < j
                    let mut sum = values[k];
                    let (mut a, mut b) = (row_ptr[i], row_ptr[j]);
                    while a < k && b < diag_pos[j] {
                        match col_idx[a].cmp(&col_idx[b]) {
                            std::cmp::Ordering::Less => a += 1,
                            std::cmp::Ordering::Greater => b += 1,
                            std::cmp::Ordering::Equal => {
                                sum -= values[a] * values[b];
                                a += 1;
                                b += 1;
                            }
                        }
                    }
                    if j < i {
                        values[k] = sum / values[diag_pos[j]];
                    } else {
                        if !(sum > 0.0) {
                            ok = false;
                            break;
                        }
                        values[k] = sum.sqrt();
                    }
                }
                if !ok {
                    shift = if shift == 0.0 {
                        1e-3 * mean_diag
                    } else {
                        shift * 10.0
                    };
                    continue 'attempt;
                }
            }
            return Ok(IncompleteCholesky {
                row_ptr,
                col_idx,
                values,
            });
        }
        Err(Error::Solver(
            "incomplete Cholesky broke down even with diagonal shifts".into(),
        ))
    }

    /// z = (L L^T)^{-1} r
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = self.row_ptr.len() - 1;
        z.copy_from_slice(r);
        for i in 0..n {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut sum = z[i];
            for k in lo..hi - 1 {
                sum -= self.values[k] * z[self.col_idx[k]];
            }
            z[i] = sum / self.values[hi - 1];
        }
        for i in (0..n).rev() {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let zi = z[i] / self.values[hi - 1];
            z[i] = zi;
            for k in lo..hi - 1 {
                z[self.col_idx[k]] -= self.values[k] * zi;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Convergence status of an eigenvalue estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateStatus {
    Converged,
    /// Iteration cap reached; the reported condition number is a lower bound.
    LowerBound,
}

#[derive(Clone, Copy, Debug)]
pub struct MatrixStats {
    /// nnz / n^2, exact.
    pub nnz_density: f64,
    /// Estimated 2-norm condition number, lambda_max / lambda_min.
    pub cond2: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub status: EstimateStatus,
}

/// Largest eigenvalue by power iteration with a seeded random start.
fn power_iteration(m: &CsrMatrix) -> (f64, bool) {
    let n = m.n();
    let mut rng = SplitMix64::new(0x5eed_1234);
    let mut v: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut av = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..EIG_MAX_ITERATIONS {
        m.matvec(&v, &mut av);
        let new_lambda = dot(&v, &av);
        let na = norm2(&av);
        if na == 0.0 {
            return (0.0, true);
        }
        for i in 0..n {
            v[i] = av[i] / na;
        }
        if (new_lambda - lambda).abs() <= EIG_TOLERANCE * new_lambda.abs() && new_lambda != 0.0 {
            return (new_lambda, true);
        }
        lambda = new_lambda;
    }
    (lambda, false)
}

/// Smallest eigenvalue by inverse power iteration through a factorization.
fn inverse_power_iteration(m: &CsrMatrix, factor: &Factorization) -> Result<(f64, bool), Error> {
    let n = m.n();
    let mut rng = SplitMix64::new(0xfeed_5678);
    let mut v: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut mu = 0.0;
    for _ in 0..EIG_MAX_ITERATIONS {
        let w = factor.solve_vec(&v)?;
        let new_mu = dot(&v, &w); // Rayleigh quotient of A^{-1}
        let nw = norm2(&w);
        if nw == 0.0 {
            return Err(Error::Solver("inverse iteration produced a zero vector".into()));
        }
        for i in 0..n {
            v[i] = w[i] / nw;
        }
        if (new_mu - mu).abs() <= EIG_TOLERANCE * new_mu.abs() && new_mu != 0.0 {
            return Ok((1.0 / new_mu, true));
        }
        mu = new_mu;
    }
    Ok((1.0 / mu, false))
}

/// nnz density and 2-norm condition estimate of an assembled system.
/// Non-converged estimates are reported as lower bounds, never silently.
pub fn matrix_stats(sys: &SparseSystem) -> Result<MatrixStats, Error> {
    let n = sys.n();
    let nnz_density = sys.matrix.nnz() as f64 / (n as f64 * n as f64);
    let (lambda_max, conv_max) = power_iteration(&sys.matrix);
    let factor = Factorization::new(&sys.matrix)?;
    let (lambda_min, conv_min) = inverse_power_iteration(&sys.matrix, &factor)?;
    if !(lambda_min > 0.0) {
        return Err(Error::Solver(format!(
            "non-positive smallest eigenvalue estimate {lambda_min:.3e}"
        )));
    }
    Ok(MatrixStats {
        nnz_density,
        cond2: lambda_max / lambda_min,
        lambda_max,
        lambda_min,
        status: if conv_max && conv_min {
            EstimateStatus::Converged
        } else {
            EstimateStatus::LowerBound
        },
    })
}

/// Writes the system matrix in MatrixMarket coordinate format (symmetric,
/// lower triangle).
pub fn write_matrix_market<W: Write>(sys: &SparseSystem, mut w: W) -> Result<(), Error> {
    let n = sys.n();
    let lower: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| {
            sys.matrix
                .row(i)
                .filter(move |&(j, _)| j <= i)
                .map(move |(j, v)| (i, j, v))
        })
        .collect();
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{} {} {}", n, n, lower.len())?;
    for (i, j, v) in lower {
        writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
    }
    Ok(())
}
