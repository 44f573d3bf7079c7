//! Exact dense linear algebra over a [`Field`].
//!
//! The single elimination engine is [`Echelon`], an incremental reduced
//! row-echelon form with optional coefficient tracking. Tracking records, for
//! every inserted vector, its expression in terms of designated earlier
//! insertions; rank, kernels, solving, quotients and cohomology all fall out
//! of that one primitive.

use crate::error::{Error, Result};
use crate::field::Field;

/// A dense rows×cols matrix acting on column vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<F: Field> {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<F::Elem>,
    field: F,
}

impl<F: Field> Mat<F> {
    pub fn zero(field: F, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
            field,
        }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    pub fn from_rows(field: F, rows: Vec<Vec<F::Elem>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            entries.extend(r);
        }
        Mat {
            rows: nrows,
            cols: ncols,
            entries,
            field,
        }
    }

    /// Rows×cols matrix with entries given by integer literals, row-major.
    pub fn from_i64(field: F, rows: usize, cols: usize, data: &[i64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat {
            rows,
            cols,
            entries: data.iter().map(|&n| field.from_i64(n)).collect(),
            field,
        }
    }

    pub fn field(&self) -> F {
        self.field
    }

    pub fn at(&self, r: usize, c: usize) -> &F::Elem {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut F::Elem {
        &mut self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn row_vecs(&self) -> impl Iterator<Item = &[F::Elem]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn transpose(&self) -> Mat<F> {
        let mut t = Mat::zero(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *t.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.field.is_zero(e))
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let f = self.field;
        (0..self.rows)
            .map(|r| {
                let mut acc = f.zero();
                for c in 0..self.cols {
                    let e = self.at(r, c);
                    if !f.is_zero(e) && !f.is_zero(&v[c]) {
                        acc = f.add(&acc, &f.mul(e, &v[c]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let f = self.field;
        let mut out = Mat::zero(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if f.is_zero(a) {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if !f.is_zero(b) {
                        *out.at_mut(r, c) = f.add(out.at(r, c), &f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = f.add(a, b);
        }
        out
    }

    pub fn sub(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = f.sub(a, b);
        }
        out
    }

    pub fn scale(&self, c: &F::Elem) -> Mat<F> {
        let f = self.field;
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = f.mul(a, c);
        }
        out
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, other.cols);
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
            field: self.field,
        }
    }
}

/// A linear subspace of k^n, spanned by the rows of `basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F: Field> {
    pub ambient_dim: usize,
    pub basis: Mat<F>,
}

impl<F: Field> Subspace<F> {
    pub fn new(ambient_dim: usize, basis: Mat<F>) -> Self {
        assert_eq!(basis.cols, ambient_dim, "basis vectors have wrong length");
        Subspace { ambient_dim, basis }
    }

    pub fn zero(field: F, ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Mat::zero(field, 0, ambient_dim),
        }
    }

    pub fn full(field: F, ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Mat::identity(field, ambient_dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        let mut ech = Echelon::new(self.basis.field(), self.ambient_dim);
        for r in self.basis.row_vecs() {
            ech.insert_untracked(r.to_vec());
        }
        ech.reduce(v.to_vec()).0.is_none()
    }

    /// Same span as another subspace (dimension plus mutual containment).
    pub fn same_span(&self, other: &Subspace<F>) -> bool {
        if self.ambient_dim != other.ambient_dim || self.dim() != other.dim() {
            return false;
        }
        other.basis.row_vecs().all(|v| self.contains(v))
    }
}

/// Outcome of a tracked insertion into an [`Echelon`].
pub enum Insert<F: Field> {
    /// The vector added a new pivot; it is now tracked row number `.0`.
    Independent(usize),
    /// The vector lies in the current span; `.0` expresses it as a
    /// combination of the previously accepted tracked insertions (plus some
    /// untracked combination that is not recorded).
    Dependent(Vec<F::Elem>),
}

struct EchRow<F: Field> {
    pivot: usize,
    v: Vec<F::Elem>,
    /// Sparse coefficients over accepted tracked insertions.
    track: Vec<(usize, F::Elem)>,
}

/// Incremental reduced row-echelon form with coefficient tracking.
pub struct Echelon<F: Field> {
    field: F,
    ncols: usize,
    rows: Vec<EchRow<F>>,
    pivot_row: Vec<Option<usize>>,
    tracked: usize,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F, ncols: usize) -> Self {
        Echelon {
            field,
            ncols,
            rows: Vec::new(),
            pivot_row: vec![None; ncols],
            tracked: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn tracked_count(&self) -> usize {
        self.tracked
    }

    /// Reduces `v` by the current rows. Returns the residual (`None` when v
    /// lies in the span) and the dense coefficient vector over accepted
    /// tracked insertions for the part that was removed.
    pub fn reduce(&self, mut v: Vec<F::Elem>) -> (Option<(usize, Vec<F::Elem>)>, Vec<F::Elem>) {
        let f = self.field;
        let mut track = vec![f.zero(); self.tracked];
        let mut first_nonzero = None;
        let mut c = 0;
        while c < self.ncols {
            if f.is_zero(&v[c]) {
                c += 1;
                continue;
            }
            match self.pivot_row[c] {
                Some(ri) => {
                    let coeff = v[c].clone();
                    let row = &self.rows[ri];
                    for (j, e) in row.v.iter().enumerate().skip(c) {
                        if !f.is_zero(e) {
                            v[j] = f.sub_mul(&v[j], &coeff, e);
                        }
                    }
                    for (ti, te) in &row.track {
                        track[*ti] = f.add(&track[*ti], &f.mul(&coeff, te));
                    }
                    // v[c] is now zero; continue from the same column.
                }
                None => {
                    if first_nonzero.is_none() {
                        first_nonzero = Some(c);
                    }
                    c += 1;
                }
            }
        }
        match first_nonzero {
            Some(p) => (Some((p, v)), track),
            None => (None, track),
        }
    }

    fn install(&mut self, pivot: usize, mut v: Vec<F::Elem>, track: Vec<(usize, F::Elem)>) {
        let f = self.field;
        // Normalize the pivot to 1.
        let inv = f.inv(&v[pivot]);
        for e in v.iter_mut() {
            if !f.is_zero(e) {
                *e = f.mul(e, &inv);
            }
        }
        let track: Vec<(usize, F::Elem)> =
            track.into_iter().map(|(i, e)| (i, f.mul(&e, &inv))).collect();
        // Back-substitute into existing rows so the form stays fully reduced.
        let new_index = self.rows.len();
        for row in self.rows.iter_mut() {
            let coeff = row.v[pivot].clone();
            if f.is_zero(&coeff) {
                continue;
            }
            for (j, e) in v.iter().enumerate().skip(pivot) {
                if !f.is_zero(e) {
                    row.v[j] = f.sub_mul(&row.v[j], &coeff, e);
                }
            }
            for (ti, te) in &track {
                merge_track(f, &mut row.track, *ti, &f.neg(&f.mul(&coeff, te)));
            }
        }
        self.rows.push(EchRow { pivot, v, track });
        self.pivot_row[pivot] = Some(new_index);
    }

    /// Inserts a vector without tracking. Returns true when it added a pivot.
    pub fn insert_untracked(&mut self, v: Vec<F::Elem>) -> bool {
        assert_eq!(v.len(), self.ncols);
        let (residual, _) = self.reduce(v);
        match residual {
            Some((pivot, v)) => {
                self.install(pivot, v, Vec::new());
                true
            }
            None => false,
        }
    }

    /// Current basis rows in pivot order (a reduced row-echelon basis).
    pub fn rows_sorted(&self) -> Vec<Vec<F::Elem>> {
        let mut rows: Vec<&EchRow<F>> = self.rows.iter().collect();
        rows.sort_by_key(|r| r.pivot);
        rows.into_iter().map(|r| r.v.clone()).collect()
    }

    /// Inserts a vector with tracking.
    pub fn insert_tracked(&mut self, v: Vec<F::Elem>) -> Insert<F> {
        assert_eq!(v.len(), self.ncols);
        let (residual, track) = self.reduce(v);
        match residual {
            Some((pivot, v)) => {
                let idx = self.tracked;
                self.tracked += 1;
                let f = self.field;
                let mut tr: Vec<(usize, F::Elem)> =
                    track.into_iter().enumerate().filter(|(_, e)| !f.is_zero(e)).collect();
                // The inserted vector itself, minus what reduce removed:
                // v_original = residual + sum(track · earlier tracked) + untracked part,
                // so the residual row carries coefficient 1 on the new index and
                // MINUS the removed tracked part.
                for (_, e) in tr.iter_mut() {
                    *e = f.neg(e);
                }
                tr.push((idx, f.one()));
                self.install(pivot, v, tr);
                Insert::Independent(idx)
            }
            None => Insert::Dependent(track),
        }
    }
}

fn merge_track<F: Field>(f: F, track: &mut Vec<(usize, F::Elem)>, idx: usize, delta: &F::Elem) {
    if f.is_zero(delta) {
        return;
    }
    for (i, e) in track.iter_mut() {
        if *i == idx {
            *e = f.add(e, delta);
            return;
        }
    }
    track.push((idx, delta.clone()));
}

/// Rank over the configured field.
pub fn rank<F: Field>(m: &Mat<F>) -> usize {
    let mut ech = Echelon::new(m.field(), m.cols);
    for r in m.row_vecs() {
        ech.insert_untracked(r.to_vec());
    }
    ech.rank()
}

/// Canonical (RREF) basis of the row space.
pub fn row_space<F: Field>(m: &Mat<F>) -> Subspace<F> {
    let mut ech = Echelon::new(m.field(), m.cols);
    for r in m.row_vecs() {
        ech.insert_untracked(r.to_vec());
    }
    echelon_to_subspace(&ech, m.cols)
}

fn echelon_to_subspace<F: Field>(ech: &Echelon<F>, ambient: usize) -> Subspace<F> {
    let mut rows: Vec<&EchRow<F>> = ech.rows.iter().collect();
    rows.sort_by_key(|r| r.pivot);
    let basis = Mat::from_rows(ech.field, rows.into_iter().map(|r| r.v.clone()).collect());
    if basis.rows == 0 {
        Subspace::zero(ech.field, ambient)
    } else {
        Subspace::new(ambient, basis)
    }
}

/// Basis of `{v : m·v = 0}`; its dimension is `cols − rank(m)`.
pub fn kernel_basis<F: Field>(m: &Mat<F>) -> Subspace<F> {
    let f = m.field();
    let mut ech = Echelon::new(f, m.rows);
    let mut kernel_rows: Vec<Vec<F::Elem>> = Vec::new();
    let mut accepted: Vec<usize> = Vec::new();
    for c in 0..m.cols {
        match ech.insert_tracked(m.col(c)) {
            Insert::Independent(_) => accepted.push(c),
            Insert::Dependent(track) => {
                // col_c = sum track_i · col_{accepted[i]}, hence a kernel vector.
                let mut v = vec![f.zero(); m.cols];
                for (i, e) in track.iter().enumerate() {
                    if !f.is_zero(e) {
                        v[accepted[i]] = e.clone();
                    }
                }
                v[c] = f.neg(&f.one());
                kernel_rows.push(v);
            }
        }
    }
    // Canonicalize to RREF.
    let mut out = Echelon::new(f, m.cols);
    for v in kernel_rows {
        out.insert_untracked(v);
    }
    echelon_to_subspace(&out, m.cols)
}

/// Solves `m·x = target`; absence of a solution is a value, not an error.
pub fn solve<F: Field>(m: &Mat<F>, target: &[F::Elem]) -> Option<Vec<F::Elem>> {
    assert_eq!(target.len(), m.rows, "target length must equal row count");
    let f = m.field();
    let mut ech = Echelon::new(f, m.rows);
    let mut accepted: Vec<usize> = Vec::new();
    for c in 0..m.cols {
        if let Insert::Independent(_) = ech.insert_tracked(m.col(c)) {
            accepted.push(c);
        }
    }
    let (residual, track) = ech.reduce(target.to_vec());
    if residual.is_some() {
        return None;
    }
    let mut x = vec![f.zero(); m.cols];
    for (i, e) in track.into_iter().enumerate() {
        x[accepted[i]] = e;
    }
    Some(x)
}

/// A reusable solver for the column space of a fixed matrix.
pub struct ColumnSolver<F: Field> {
    ech: Echelon<F>,
    accepted: Vec<usize>,
    cols: usize,
}

impl<F: Field> ColumnSolver<F> {
    pub fn new(m: &Mat<F>) -> Self {
        let mut ech = Echelon::new(m.field(), m.rows);
        let mut accepted = Vec::new();
        for c in 0..m.cols {
            if let Insert::Independent(_) = ech.insert_tracked(m.col(c)) {
                accepted.push(c);
            }
        }
        ColumnSolver {
            ech,
            accepted,
            cols: m.cols,
        }
    }

    pub fn solve(&self, target: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let f = self.ech.field;
        let (residual, track) = self.ech.reduce(target.to_vec());
        if residual.is_some() {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (i, e) in track.into_iter().enumerate() {
            x[self.accepted[i]] = e;
        }
        Some(x)
    }
}

/// Splits `k^ambient` as `sub ⊕ representatives` and returns the projection
/// onto the representatives in quotient coordinates. The representatives are
/// the lexicographically first standard basis vectors independent of `sub`,
/// so quotients of path spaces stay monomial whenever possible.
pub fn quotient<F: Field>(ambient_dim: usize, sub: &Subspace<F>) -> (Subspace<F>, Mat<F>) {
    assert_eq!(sub.ambient_dim, ambient_dim, "ambient dimension mismatch");
    let f = sub.basis.field();
    let mut ech = Echelon::new(f, ambient_dim);
    for r in sub.basis.row_vecs() {
        ech.insert_untracked(r.to_vec());
    }
    let mut reps: Vec<Vec<F::Elem>> = Vec::new();
    for j in 0..ambient_dim {
        let mut e = vec![f.zero(); ambient_dim];
        e[j] = f.one();
        if let Insert::Independent(_) = ech.insert_tracked(e.clone()) {
            reps.push(e);
        }
    }
    let c = reps.len();
    let mut projection = Mat::zero(f, c, ambient_dim);
    for j in 0..ambient_dim {
        let mut e = vec![f.zero(); ambient_dim];
        e[j] = f.one();
        let (residual, track) = ech.reduce(e);
        debug_assert!(residual.is_none());
        for (i, t) in track.into_iter().enumerate() {
            *projection.at_mut(i, j) = t;
        }
    }
    let reps = if c == 0 {
        Subspace::zero(f, ambient_dim)
    } else {
        Subspace::new(ambient_dim, Mat::from_rows(f, reps))
    };
    (reps, projection)
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse<F: Field>(m: &Mat<F>) -> Option<Mat<F>> {
    assert_eq!(m.rows, m.cols, "inverse of a non-square matrix");
    let f = m.field();
    let solver = ColumnSolver::new(m);
    let mut out = Mat::zero(f, m.rows, m.rows);
    for c in 0..m.rows {
        let mut e = vec![f.zero(); m.rows];
        e[c] = f.one();
        let x = solver.solve(&e)?;
        for (r, v) in x.into_iter().enumerate() {
            *out.at_mut(r, c) = v;
        }
    }
    Some(out)
}

/// Cohomology at the middle of `· --d_in--> · --d_out--> ·`.
///
/// Returns the dimension together with cocycle representatives spanning a
/// complement of the coboundaries inside the cocycles.
pub fn cohomology<F: Field>(d_in: &Mat<F>, d_out: &Mat<F>) -> Result<(usize, Subspace<F>)> {
    assert_eq!(d_out.cols, d_in.rows, "differentials do not compose");
    if !d_out.mul(d_in).is_zero() {
        return Err(Error::ComplexBroken(0));
    }
    let f = d_in.field();
    let cocycles = kernel_basis(d_out);
    let dim = cocycles.dim() - rank(d_in);
    let mut ech = Echelon::new(f, d_in.rows);
    for c in 0..d_in.cols {
        ech.insert_untracked(d_in.col(c));
    }
    let mut reps: Vec<Vec<F::Elem>> = Vec::new();
    for z in cocycles.basis.row_vecs() {
        if ech.insert_untracked(z.to_vec()) {
            reps.push(z.to_vec());
        }
    }
    assert_eq!(reps.len(), dim, "rank bookkeeping is inconsistent");
    let reps = if reps.is_empty() {
        Subspace::zero(f, d_in.rows)
    } else {
        Subspace::new(d_in.rows, Mat::from_rows(f, reps))
    };
    Ok((dim, reps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn rank_examples() {
        let q = Rationals;
        assert_eq!(rank(&Mat::identity(q, 3)), 3);
        assert_eq!(rank(&Mat::from_i64(q, 2, 2, &[1, 2, 2, 4])), 1);
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(rank(&Mat::from_i64(f2, 2, 2, &[1, 1, 1, 1])), 1);
    }

    #[test]
    fn kernel_examples() {
        let q = Rationals;
        let zero_map = Mat::zero(q, 2, 3);
        assert_eq!(kernel_basis(&zero_map).dim(), 3);

        let m = Mat::from_i64(q, 2, 2, &[1, 2, 2, 4]);
        let k = kernel_basis(&m);
        assert_eq!(k.dim(), 1);
        let v = vec![q.from_i64(-2), q.from_i64(1)];
        assert!(k.contains(&v));
        assert!(m.mul_vec(k.basis.row(0)).iter().all(|e| q.is_zero(e)));

        assert_eq!(kernel_basis(&Mat::identity(q, 4)).dim(), 0);
    }

    #[test]
    fn solve_examples() {
        let q = Rationals;
        let id = Mat::identity(q, 3);
        let b = vec![q.from_i64(5), q.from_i64(-1), q.from_i64(7)];
        assert_eq!(solve(&id, &b).unwrap(), b);

        let m = Mat::from_i64(q, 2, 2, &[1, 2, 2, 4]);
        let b = vec![q.from_i64(1), q.from_i64(2)];
        let x = solve(&m, &b).unwrap();
        assert_eq!(m.mul_vec(&x), b);

        let b = vec![q.from_i64(1), q.from_i64(0)];
        assert!(solve(&m, &b).is_none());
    }

    #[test]
    fn quotient_examples() {
        let q = Rationals;
        let full = Subspace::full(q, 3);
        let (reps, _) = quotient(3, &full);
        assert_eq!(reps.dim(), 0);

        let (reps, proj) = quotient(3, &Subspace::zero(q, 3));
        assert_eq!(reps.dim(), 3);
        assert_eq!(proj, Mat::identity(q, 3));

        let diag = Subspace::new(2, Mat::from_i64(q, 1, 2, &[1, 1]));
        let (reps, proj) = quotient(2, &diag);
        assert_eq!(reps.dim(), 1);
        let image_of_diag = proj.mul_vec(&[q.one(), q.one()]);
        assert!(image_of_diag.iter().all(|e| q.is_zero(e)));
    }

    #[test]
    fn cohomology_examples() {
        let q = Rationals;
        let zero_in = Mat::zero(q, 4, 0);
        let zero_out = Mat::zero(q, 0, 4);
        let (dim, _) = cohomology(&zero_in, &zero_out).unwrap();
        assert_eq!(dim, 4);

        let (dim, _) = cohomology(&Mat::zero(q, 3, 0), &Mat::identity(q, 3)).unwrap();
        assert_eq!(dim, 0);

        let d_in = Mat::from_i64(q, 2, 1, &[1, 0]);
        let d_out = Mat::from_i64(q, 1, 2, &[0, 1]);
        let (dim, _) = cohomology(&d_in, &d_out).unwrap();
        assert_eq!(dim, 0);

        let bad = cohomology(&Mat::identity(q, 2), &Mat::identity(q, 2));
        assert!(matches!(bad, Err(Error::ComplexBroken(_))));
    }

    #[test]
    fn projection_kills_subspace_exactly() {
        let q = Rationals;
        let sub = Subspace::new(4, Mat::from_i64(q, 2, 4, &[1, 2, 3, 4, 0, 1, 0, 2]));
        let (reps, proj) = quotient(4, &sub);
        assert_eq!(reps.dim() + sub.dim(), 4);
        for r in sub.basis.row_vecs() {
            assert!(proj.mul_vec(r).iter().all(|e| q.is_zero(e)));
        }
        // Projection restricted to representatives is the identity.
        for (i, r) in reps.basis.row_vecs().enumerate() {
            let image = proj.mul_vec(r);
            for (j, e) in image.iter().enumerate() {
                assert_eq!(q.is_zero(e), i != j);
            }
        }
    }
}
