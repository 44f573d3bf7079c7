//! The coresolution engine: Ext groups from an explicit exact sequence of
//! injective modules built out of the graded slices.
//!
//! For a module W the segment has terms
//!
//! ```text
//! C^{2q}(W)   = ⊕_i Hom(A^q_i, W_i)               (one summand per vertex)
//! C^{2q+1}(W) = ⊕_a Hom(A^q_{t(a)}, W_{h(a)})     (one summand per expanded arrow)
//! ```
//!
//! each a module via (b·f)(s) = f(s·b). Even differentials are the
//! intertwiner-difference maps γ; odd differentials compose the projection
//! onto coker γ with the inverse of the connecting isomorphism ∂ and the
//! inclusion of the next kernel. ∂ itself is computed by the snake recipe:
//! extend a kernel element g degreewise by zero on a chosen complement, then
//! measure the failure of the extension to intertwine the arrow actions.
//! The class of that failure is independent of the complement choice, which
//! the verification suite asserts by recomputing with random complements.
//!
//! Ext^p(V, W) is the degree-p cohomology of Hom(V, C^•(W)) with the induced
//! post-composition differentials.

use std::collections::HashMap;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::algebra::{AlgebraModel, GradedSlice, SectorVec};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{
    cohomology, inverse, kernel_basis, quotient, rank, ColumnSolver, Echelon, Insert, Mat,
    Subspace,
};
use crate::quiver::Word;
use crate::rep::{gamma_matrix, hom_domain_dim, ModuleForm, Representation};

/// Flattened basis of one coresolution term: elements (group, slice entry,
/// coefficient of W), grouped into vertex blocks by the tail of the slice
/// entry. For even terms the group is a vertex, for odd terms an arrow.
struct TermLayout {
    elems: Vec<(usize, usize, usize)>,
    pos: HashMap<(usize, usize, usize), usize>,
    dims: Vec<usize>,
}

impl TermLayout {
    fn even<F: Field>(slice: &GradedSlice<F>, nv: usize, wdims: &[usize]) -> TermLayout {
        let mut elems = Vec::new();
        let mut dims = vec![0; nv];
        for j in 0..nv {
            for i in 0..nv {
                for (e, entry) in slice.entries().iter().enumerate() {
                    if entry.head == i && entry.tail == j {
                        for w in 0..wdims[i] {
                            elems.push((i, e, w));
                            dims[j] += 1;
                        }
                    }
                }
            }
        }
        let pos = elems.iter().enumerate().map(|(p, k)| (*k, p)).collect();
        TermLayout { elems, pos, dims }
    }

    fn odd<F: Field>(
        slice: &GradedSlice<F>,
        arrows: &[crate::quiver::Arrow],
        nv: usize,
        wdims: &[usize],
    ) -> TermLayout {
        let mut elems = Vec::new();
        let mut dims = vec![0; nv];
        for j in 0..nv {
            for (ai, a) in arrows.iter().enumerate() {
                for (e, entry) in slice.entries().iter().enumerate() {
                    if entry.head == a.tail && entry.tail == j {
                        for w in 0..wdims[a.head] {
                            elems.push((ai, e, w));
                            dims[j] += 1;
                        }
                    }
                }
            }
        }
        let pos = elems.iter().enumerate().map(|(p, k)| (*k, p)).collect();
        TermLayout { elems, pos, dims }
    }

    fn dim(&self) -> usize {
        self.elems.len()
    }
}

/// Builds the (b·f)(s) = f(s·b) module structure of a term.
fn term_module<F: Field>(
    model: &AlgebraModel<F>,
    slice: &GradedSlice<F>,
    layout: &TermLayout,
    w: &ModuleForm<F>,
) -> Result<ModuleForm<F>> {
    let ctx = model.context();
    let f = ctx.field;
    let n = layout.dim();
    let mut actions = Vec::with_capacity(ctx.quiver.num_arrows());
    for (bi, _b) in ctx.quiver.arrows.iter().enumerate() {
        let rb = slice.right_action(bi);
        let mut act = Mat::zero(f, n, n);
        for (col, &(g, rho, wc)) in layout.elems.iter().enumerate() {
            // f supported on entry ρ contributes to (b·f) at entries ξ' with
            // ξ'·b involving ρ.
            for (row_elem, &(g2, xi, wc2)) in layout.elems.iter().enumerate() {
                if g2 != g || wc2 != wc {
                    continue;
                }
                let c = rb.at(rho, xi);
                if !f.is_zero(c) {
                    *act.at_mut(row_elem, col) = c.clone();
                }
            }
        }
        actions.push(act);
    }
    ModuleForm::new(Arc::clone(ctx), layout.dims.clone(), actions).map_err(|e| {
        Error::ShapeMismatch(format!("coresolution term is not a module: {e}"))
    })
    .map(|m| {
        let _ = &w;
        m
    })
}

/// Matrix of γ: C^{2q} → C^{2q+1} for the slice A^q with coefficients W.
fn gamma_term<F: Field>(
    model: &AlgebraModel<F>,
    slice: &GradedSlice<F>,
    even: &TermLayout,
    odd: &TermLayout,
    w: &ModuleForm<F>,
) -> Mat<F> {
    let ctx = model.context();
    let f = ctx.field;
    let mut out = Mat::zero(f, odd.dim(), even.dim());
    for (row, &(ai, xi, wc)) in odd.elems.iter().enumerate() {
        let a = &ctx.quiver.arrows[ai];
        // f_{h(a)}(a·ξ): left action of a out of entry ξ.
        let la = slice.left_action(ai);
        for (rho, entry) in slice.entries().iter().enumerate() {
            let c = la.at(rho, xi);
            if f.is_zero(c) {
                continue;
            }
            debug_assert_eq!(entry.head, a.head);
            let col = even.pos[&(a.head, rho, wc)];
            *out.at_mut(row, col) = f.add(out.at(row, col), c);
        }
        // −X^W_a ∘ f_{t(a)} evaluated at ξ.
        let xw = w.block_of(&w.actions[ai], a.head, a.tail);
        for wp in 0..w.dims[a.tail] {
            let c = xw.at(wc, wp);
            if f.is_zero(c) {
                continue;
            }
            let col = even.pos[&(a.tail, xi, wp)];
            *out.at_mut(row, col) = f.sub(out.at(row, col), c);
        }
    }
    out
}

/// The augmentation W → C^0(W), w ↦ (λ ↦ λ·w).
fn augmentation<F: Field>(
    model: &AlgebraModel<F>,
    slice0: &GradedSlice<F>,
    even0: &TermLayout,
    w: &ModuleForm<F>,
) -> Mat<F> {
    let f = model.field();
    let mut out = Mat::zero(f, even0.dim(), w.total_dim);
    // Cache the W-action of each slice-0 lift.
    let mut action_of_entry: Vec<Mat<F>> = Vec::with_capacity(slice0.dim());
    for e in 0..slice0.dim() {
        let lift = slice0.lift(e);
        let words = model.words(lift.deg, lift.head, lift.tail);
        action_of_entry.push(rho_on_module(w, &words, &lift.coeffs, lift.head));
    }
    for (row, &(i, xi, wc)) in even0.elems.iter().enumerate() {
        let entry = &slice0.entries()[xi];
        let j = entry.tail;
        let act = &action_of_entry[xi];
        for wp in 0..w.dims[j] {
            let c = act.at(w.offsets[i] + wc, w.offsets[j] + wp);
            if !f.is_zero(c) {
                *out.at_mut(row, w.offsets[j] + wp) = c.clone();
            }
        }
    }
    out
}

/// Total-space action on W of a path vector (sum of coefficient · word).
fn rho_on_module<F: Field>(
    w: &ModuleForm<F>,
    words: &[Word],
    coeffs: &[F::Elem],
    head: usize,
) -> Mat<F> {
    let f = w.field();
    let mut out = Mat::zero(f, w.total_dim, w.total_dim);
    for (wi, c) in coeffs.iter().enumerate() {
        if f.is_zero(c) {
            continue;
        }
        let m = if words[wi].is_empty() {
            w.projector(head)
        } else {
            w.word_action(&words[wi])
        };
        out = out.add(&m.scale(c));
    }
    out
}

/// How the degreewise complement inside K^q is chosen when extending kernel
/// elements in the snake construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplementChoice {
    /// The slice's own lift representatives.
    Lifts,
    /// Representatives perturbed by seeded random elements of K^{q+1}.
    Random(u64),
}

/// Splitting data for one complement choice.
struct ComplementMap<F: Field> {
    /// Per (deg, head, tail): reduction echelon plus the representatives.
    data: HashMap<(usize, usize, usize), (Echelon<F>, Vec<SectorVec<F>>)>,
}

fn build_complement<F: Field>(
    model: &AlgebraModel<F>,
    slice: &GradedSlice<F>,
    choice: ComplementChoice,
) -> ComplementMap<F> {
    let f = model.field();
    let seed = match choice {
        ComplementChoice::Lifts => return ComplementMap { data: HashMap::new() },
        ComplementChoice::Random(s) => s,
    };
    let mut rng = StdRng::seed_from_u64(seed);
    let nv = model.context().quiver.num_vertices();
    let mut data = HashMap::new();
    let mut by_key: HashMap<(usize, usize, usize), Vec<usize>> = HashMap::new();
    for (e, entry) in slice.entries().iter().enumerate() {
        by_key
            .entry((entry.deg, entry.head, entry.tail))
            .or_default()
            .push(e);
    }
    let _ = nv;
    for (key, entries) in by_key {
        let Some(kb) = slice.knext_basis(key.0, key.1, key.2) else {
            continue;
        };
        let ambient = slice.lift(entries[0]).coeffs.len();
        let mut ech = Echelon::new(f, ambient);
        for r in kb.row_vecs() {
            ech.insert_untracked(r.to_vec());
        }
        let mut reps = Vec::with_capacity(entries.len());
        for &e in &entries {
            let mut v = slice.lift(e).clone();
            for r in kb.row_vecs() {
                let c = f.sample(&mut rng);
                for (k, x) in r.iter().enumerate() {
                    v.coeffs[k] = f.add(&v.coeffs[k], &f.mul(&c, x));
                }
            }
            let accepted = matches!(ech.insert_tracked(v.coeffs.clone()), Insert::Independent(_));
            assert!(accepted, "perturbed representative became dependent");
            reps.push(v);
        }
        data.insert(key, (ech, reps));
    }
    ComplementMap { data }
}

/// Splits v ∈ (K^q)_d into its K^{q+1} part for the chosen complement.
fn split_knext<F: Field>(
    slice: &GradedSlice<F>,
    complement: &ComplementMap<F>,
    v: &SectorVec<F>,
) -> SectorVec<F> {
    let key = (v.deg, v.head, v.tail);
    match complement.data.get(&key) {
        None => slice.split_default(v).0,
        Some((ech, reps)) => {
            let f = reps[0].coeffs.len();
            let _ = f;
            let field_of = |s: &SectorVec<F>| s.coeffs.len();
            let _ = field_of;
            let (residual, track) = ech.reduce(v.coeffs.clone());
            assert!(residual.is_none(), "vector is not in the ideal power");
            let mut rest = v.clone();
            let fld = slice_field(slice);
            for (local, c) in track.iter().enumerate() {
                if fld.is_zero(c) {
                    continue;
                }
                for (k, e) in reps[local].coeffs.iter().enumerate() {
                    rest.coeffs[k] = fld.sub_mul(&rest.coeffs[k], c, e);
                }
            }
            rest
        }
    }
}

fn slice_field<F: Field>(_slice: &GradedSlice<F>) -> F
where
    F: Default,
{
    F::default()
}

/// One segment of the coresolution of W: terms C^0 … C^{max_index}, the
/// differentials between them, and the augmentation.
pub struct CoresolutionSegment<F: Field> {
    pub max_index: usize,
    pub terms: Vec<ModuleForm<F>>,
    pub differentials: Vec<Mat<F>>,
    pub augmentation: Mat<F>,
}

/// Builds the coresolution of W out to index `p_max + 1`.
pub fn coresolution<F: Field>(
    model: &AlgebraModel<F>,
    w: &ModuleForm<F>,
    p_max: usize,
) -> Result<CoresolutionSegment<F>> {
    coresolution_with(model, w, p_max, ComplementChoice::Lifts)
}

/// As [`coresolution`], with an explicit complement choice for the odd
/// differentials.
pub fn coresolution_with<F: Field>(
    model: &AlgebraModel<F>,
    w: &ModuleForm<F>,
    p_max: usize,
    complement: ComplementChoice,
) -> Result<CoresolutionSegment<F>> {
    let ctx = model.context();
    let nv = ctx.quiver.num_vertices();
    let arrows = ctx.quiver.arrows.clone();
    let max_index = p_max + 1;
    let q_max = max_index / 2;
    let mut slices = Vec::with_capacity(q_max + 1);
    for q in 0..=q_max {
        slices.push(model.slice(q)?);
    }
    let layouts: Vec<TermLayout> = (0..=max_index)
        .map(|p| {
            let q = p / 2;
            if p % 2 == 0 {
                TermLayout::even(&slices[q], nv, &w.dims)
            } else {
                TermLayout::odd(&slices[q], &arrows, nv, &w.dims)
            }
        })
        .collect();
    let terms: Result<Vec<ModuleForm<F>>> = (0..=max_index)
        .map(|p| term_module(model, &slices[p / 2], &layouts[p], w))
        .collect();
    let terms = terms?;

    let mut differentials = Vec::with_capacity(max_index);
    for p in 0..max_index {
        let q = p / 2;
        if p % 2 == 0 {
            differentials.push(gamma_term(model, &slices[q], &layouts[p], &layouts[p + 1], w));
        } else {
            let d = odd_differential(
                model,
                &slices[q],
                &slices[q + 1],
                &layouts[p],
                &layouts[p + 1],
                &differentials[p - 1],
                w,
                complement,
            )?;
            differentials.push(d);
        }
    }
    let augmentation = augmentation(model, &slices[0], &layouts[0], w);
    Ok(CoresolutionSegment {
        max_index,
        terms,
        differentials,
        augmentation,
    })
}

/// The snake-lemma connecting matrix ∂: Hom(A^{q+1}, W) → coker γ_{A^q,W}.
///
/// Returns the square matrix in the bases (kernel of γ_{A^{q+1},W},
/// canonical cokernel representatives).
pub fn connecting_matrix<F: Field>(
    model: &AlgebraModel<F>,
    q: usize,
    w: &ModuleForm<F>,
) -> Result<Mat<F>> {
    let ctx = model.context();
    let nv = ctx.quiver.num_vertices();
    let arrows = ctx.quiver.arrows.clone();
    let slice_q = model.slice(q)?;
    let slice_q1 = model.slice(q + 1)?;
    let even_q = TermLayout::even(&slice_q, nv, &w.dims);
    let odd_q = TermLayout::odd(&slice_q, &arrows, nv, &w.dims);
    let even_q1 = TermLayout::even(&slice_q1, nv, &w.dims);
    let gamma_q = gamma_term(model, &slice_q, &even_q, &odd_q, w);
    let (partial, _kernel, _proj) = connecting_data(
        model,
        &slice_q,
        &slice_q1,
        &odd_q,
        &even_q1,
        &gamma_q,
        w,
        ComplementChoice::Lifts,
        q,
    )?;
    Ok(partial)
}

/// Shared construction of ∂ together with the kernel basis of γ_{A^{q+1},W}
/// and the cokernel projection of γ_{A^q,W}.
#[allow(clippy::too_many_arguments)]
fn connecting_data<F: Field>(
    model: &AlgebraModel<F>,
    slice_q: &GradedSlice<F>,
    slice_q1: &GradedSlice<F>,
    odd_q: &TermLayout,
    even_q1: &TermLayout,
    gamma_q: &Mat<F>,
    w: &ModuleForm<F>,
    complement: ComplementChoice,
    q: usize,
) -> Result<(Mat<F>, Subspace<F>, Mat<F>)> {
    let ctx = model.context();
    let f = ctx.field;
    let gamma_q1 = {
        let nv = ctx.quiver.num_vertices();
        let arrows = ctx.quiver.arrows.clone();
        let odd_q1 = TermLayout::odd(slice_q1, &arrows, nv, &w.dims);
        gamma_term(model, slice_q1, even_q1, &odd_q1, w)
    };
    let kernel = kernel_basis(&gamma_q1);
    // Image of γ_q as a subspace of the odd term.
    let mut im = Echelon::new(f, gamma_q.rows);
    for c in 0..gamma_q.cols {
        im.insert_untracked(gamma_q.col(c));
    }
    let im_space = if im.rank() == 0 {
        Subspace::zero(f, gamma_q.rows)
    } else {
        Subspace::new(gamma_q.rows, Mat::from_rows(f, im.rows_sorted()))
    };
    let (_reps, proj) = quotient(gamma_q.rows, &im_space);
    let r = kernel.dim();
    if proj.rows != r {
        return Err(Error::SingularConnectingMap(q));
    }
    let comp = build_complement(model, slice_q, complement);

    let mut partial = Mat::zero(f, r, r);
    for (gcol, g) in kernel.basis.row_vecs().enumerate() {
        let h = snake_failure(model, slice_q, slice_q1, odd_q, even_q1, g, w, &comp);
        let class = proj.mul_vec(&h);
        for (row, c) in class.into_iter().enumerate() {
            *partial.at_mut(row, gcol) = c;
        }
    }
    if rank(&partial) != r {
        return Err(Error::SingularConnectingMap(q));
    }
    Ok((partial, kernel, proj))
}

/// Evaluates the snake-lemma failure cocycle h for one kernel element g of
/// γ_{A^{q+1},W}: h_a(ξ) = G(a·ξ̃) − a·G(ξ̃), where ξ̃ is the stored lift of
/// ξ and G extends g∘π_{q+1} by zero on the chosen complement.
#[allow(clippy::too_many_arguments)]
fn snake_failure<F: Field>(
    model: &AlgebraModel<F>,
    slice_q: &GradedSlice<F>,
    slice_q1: &GradedSlice<F>,
    odd_q: &TermLayout,
    even_q1: &TermLayout,
    g: &[F::Elem],
    w: &ModuleForm<F>,
    comp: &ComplementMap<F>,
) -> Vec<F::Elem> {
    let ctx = model.context();
    let f = ctx.field;
    let eval_g = |v: &SectorVec<F>| -> Vec<F::Elem> {
        // G(v) = g(π_{q+1}(v_{K^{q+1}})), as a total W vector.
        let vnext = split_with(slice_q, comp, v);
        let mut out = vec![f.zero(); w.total_dim];
        if vnext.coeffs.iter().all(|e| f.is_zero(e)) {
            return out;
        }
        let coords = slice_q1.project(&vnext);
        for (xi, c) in coords.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let head = slice_q1.entries()[xi].head;
            for wc in 0..w.dims[head] {
                let gval = &g[even_q1.pos[&(head, xi, wc)]];
                if !f.is_zero(gval) {
                    out[w.offsets[head] + wc] =
                        f.add(&out[w.offsets[head] + wc], &f.mul(c, gval));
                }
            }
        }
        out
    };
    let mut h = vec![f.zero(); odd_q.dim()];
    for (ai, a) in ctx.quiver.arrows.iter().enumerate() {
        for (xi, entry) in slice_q.entries().iter().enumerate() {
            if entry.head != a.tail {
                continue;
            }
            let lift = slice_q.lift(xi);
            let a_lift = model.concat_arrow_left(ai, lift);
            let g_alift = eval_g(&a_lift);
            let g_lift = eval_g(lift);
            let a_glift = w.actions[ai].mul_vec(&g_lift);
            for wc in 0..w.dims[a.head] {
                let idx = w.offsets[a.head] + wc;
                let val = f.sub(&g_alift[idx], &a_glift[idx]);
                h[odd_q.pos[&(ai, xi, wc)]] = val;
            }
        }
    }
    h
}

fn split_with<F: Field>(
    slice: &GradedSlice<F>,
    comp: &ComplementMap<F>,
    v: &SectorVec<F>,
) -> SectorVec<F> {
    let key = (v.deg, v.head, v.tail);
    match comp.data.get(&key) {
        None => slice.split_default(v).0,
        Some((ech, reps)) => {
            let f = v_field(v, slice);
            let (residual, track) = ech.reduce(v.coeffs.clone());
            assert!(residual.is_none(), "vector is not in the ideal power");
            let mut rest = v.clone();
            for (local, c) in track.iter().enumerate() {
                if f.is_zero(c) {
                    continue;
                }
                for (k, e) in reps[local].coeffs.iter().enumerate() {
                    rest.coeffs[k] = f.sub_mul(&rest.coeffs[k], c, e);
                }
            }
            rest
        }
    }
}

fn v_field<F: Field>(_v: &SectorVec<F>, _slice: &GradedSlice<F>) -> F
where
    F: Default,
{
    F::default()
}

/// The odd differential d_{2q+1} = ι ∘ ∂^{-1} ∘ π_c.
#[allow(clippy::too_many_arguments)]
fn odd_differential<F: Field>(
    model: &AlgebraModel<F>,
    slice_q: &GradedSlice<F>,
    slice_q1: &GradedSlice<F>,
    odd_q: &TermLayout,
    even_q1: &TermLayout,
    gamma_q: &Mat<F>,
    w: &ModuleForm<F>,
    complement: ComplementChoice,
) -> Result<Mat<F>> {
    let q = slice_q.power;
    let (partial, kernel, proj) = connecting_data(
        model, slice_q, slice_q1, odd_q, even_q1, gamma_q, w, complement, q,
    )?;
    let inv = inverse(&partial).ok_or(Error::SingularConnectingMap(q))?;
    // Columns of the kernel basis as the inclusion ι.
    let incl = kernel.basis.transpose();
    Ok(incl.mul(&inv).mul(&proj))
}

/// Ext dimensions and cocycle representatives.
pub struct ExtResult<F: Field> {
    pub dims: Vec<usize>,
    /// Per degree: representative rows in ⊕_i Hom(V_i, C^p_i) coordinates.
    pub cocycles: Vec<Mat<F>>,
}

/// Ext^p(V, W) for 0 ≤ p ≤ p_max via the coresolution.
pub fn ext_dims<F: Field>(
    model: &AlgebraModel<F>,
    v: &ModuleForm<F>,
    w: &ModuleForm<F>,
    p_max: usize,
) -> Result<ExtResult<F>> {
    let seg = coresolution(model, w, p_max)?;
    ext_dims_from_segment(model, v, &seg, p_max)
}

/// As [`ext_dims`] but reusing an already-built segment for W.
pub fn ext_dims_from_segment<F: Field>(
    model: &AlgebraModel<F>,
    v: &ModuleForm<F>,
    seg: &CoresolutionSegment<F>,
    p_max: usize,
) -> Result<ExtResult<F>> {
    let f = model.field();
    assert!(seg.max_index >= p_max + 1, "segment is too short");
    // Hom_Λ(V, C^p) as kernels of γ, with post-composition differentials.
    let mut kernels: Vec<Subspace<F>> = Vec::with_capacity(p_max + 2);
    for p in 0..=p_max + 1 {
        kernels.push(kernel_basis(&gamma_matrix(v, &seg.terms[p])));
    }
    // Induced differential on hom coordinates: blockwise post-composition.
    let mut restricted: Vec<Mat<F>> = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        let big = postcompose_matrix(v, &seg.terms[p], &seg.terms[p + 1], &seg.differentials[p]);
        // Restrict to the kernels on both sides.
        let target = kernels[p + 1].basis.transpose();
        let solver = ColumnSolver::new(&target);
        let mut m = Mat::zero(f, kernels[p + 1].dim(), kernels[p].dim());
        for (c, row) in kernels[p].basis.row_vecs().enumerate() {
            let image = big.mul_vec(row);
            let coords = solver
                .solve(&image)
                .expect("differential must preserve module maps");
            for (r, e) in coords.into_iter().enumerate() {
                *m.at_mut(r, c) = e;
            }
        }
        restricted.push(m);
    }
    let mut dims = Vec::with_capacity(p_max + 1);
    let mut cocycles = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        let d_in = if p == 0 {
            Mat::zero(f, kernels[0].dim(), 0)
        } else {
            restricted[p - 1].clone()
        };
        let (h, reps) = cohomology(&d_in, &restricted[p])?;
        dims.push(h);
        // Map representatives back to ambient hom coordinates.
        let ambient = if reps.dim() == 0 {
            Mat::zero(f, 0, hom_domain_dim(v, &seg.terms[p]))
        } else {
            reps.basis.mul(&kernels[p].basis)
        };
        cocycles.push(ambient);
        let _ = rank(&d_in);
    }
    Ok(ExtResult { dims, cocycles })
}

/// The matrix of f ↦ d∘f on ⊕_i Hom(V_i, (C^p)_i) coordinates.
fn postcompose_matrix<F: Field>(
    v: &ModuleForm<F>,
    term_p: &ModuleForm<F>,
    term_p1: &ModuleForm<F>,
    d: &Mat<F>,
) -> Mat<F> {
    let f = v.field();
    let nv = v.dims.len();
    let rows = hom_domain_dim(v, term_p1);
    let cols = hom_domain_dim(v, term_p);
    let mut out = Mat::zero(f, rows, cols);
    let mut row_off = 0;
    let mut col_offs = Vec::with_capacity(nv);
    let mut acc = 0;
    for i in 0..nv {
        col_offs.push(acc);
        acc += v.dims[i] * term_p.dims[i];
    }
    for i in 0..nv {
        // d's (i, i) block.
        for r in 0..term_p1.dims[i] {
            for rr in 0..term_p.dims[i] {
                let c = d.at(term_p1.offsets[i] + r, term_p.offsets[i] + rr);
                if f.is_zero(c) {
                    continue;
                }
                for vc in 0..v.dims[i] {
                    let row = row_off + r * v.dims[i] + vc;
                    let col = col_offs[i] + rr * v.dims[i] + vc;
                    *out.at_mut(row, col) = c.clone();
                }
            }
        }
        row_off += v.dims[i] * term_p1.dims[i];
    }
    out
}

/// Ext for relation-free models: (dim ker γ, dim coker γ); all higher
/// degrees vanish.
pub fn ext_hereditary<F: Field>(v: &ModuleForm<F>, w: &ModuleForm<F>) -> Result<(usize, usize)> {
    if !v.context().relations.is_empty() {
        return Err(Error::HasRelations);
    }
    let g = gamma_matrix(v, w);
    let r = rank(&g);
    Ok((g.cols - r, g.rows - r))
}

/// First page of the Ext spectral sequence over a point: a single nonzero
/// row E₁^{p,0} = dim Hom(V, C^p(W)); the table is indexed `[p][q]`.
pub fn spectral_page<F: Field>(
    model: &AlgebraModel<F>,
    v: &ModuleForm<F>,
    w: &ModuleForm<F>,
    p_max: usize,
) -> Result<Vec<Vec<usize>>> {
    let seg = coresolution(model, w, p_max)?;
    let mut table = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        let mut row = vec![0usize; p_max + 1];
        row[0] = kernel_basis(&gamma_matrix(v, &seg.terms[p])).dim();
        table.push(row);
    }
    Ok(table)
}

/// Result of one coresolution check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Structured report of the six coresolution checks.
#[derive(Clone, Debug)]
pub struct CoresolutionReport {
    pub checks: Vec<CheckResult>,
}

impl CoresolutionReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Verifies a coresolution segment: augmentation injectivity and image,
/// complex property, exactness, module linearity of the differentials, and
/// injectivity of the terms (via the resolution oracle on the simples).
pub fn verify_coresolution<F: Field>(
    model: &AlgebraModel<F>,
    w: &ModuleForm<F>,
    seg: &CoresolutionSegment<F>,
) -> CoresolutionReport {
    let f = model.field();
    let ctx = model.context();
    let nv = ctx.quiver.num_vertices();
    let mut checks = Vec::new();
    let p_checkable = seg.max_index.saturating_sub(1);

    // (i) augmentation injective
    let aug_rank = rank(&seg.augmentation);
    checks.push(CheckResult {
        name: "augmentation-injective".into(),
        pass: aug_rank == w.total_dim,
        detail: format!("rank {} of {}", aug_rank, w.total_dim),
    });

    // (ii) image(augmentation) = ker d_0
    let composite_zero = if seg.differentials.is_empty() {
        true
    } else {
        seg.differentials[0].mul(&seg.augmentation).is_zero()
    };
    let ker_d0 = if seg.differentials.is_empty() {
        seg.terms[0].total_dim
    } else {
        seg.terms[0].total_dim - rank(&seg.differentials[0])
    };
    checks.push(CheckResult {
        name: "augmentation-spans-kernel".into(),
        pass: composite_zero && ker_d0 == aug_rank,
        detail: format!("dim ker d0 = {ker_d0}, rank aug = {aug_rank}"),
    });

    // (iii) d_{p+1} ∘ d_p = 0
    let mut complex_ok = true;
    let mut complex_detail = String::from("all composites vanish");
    for p in 0..seg.differentials.len().saturating_sub(1) {
        if !seg.differentials[p + 1].mul(&seg.differentials[p]).is_zero() {
            complex_ok = false;
            complex_detail = format!("d_{} ∘ d_{} ≠ 0", p + 1, p);
            break;
        }
    }
    checks.push(CheckResult {
        name: "complex".into(),
        pass: complex_ok,
        detail: complex_detail,
    });

    // (iv) exactness at positions 1..=P
    let mut exact_ok = true;
    let mut exact_detail = String::from("exact at all interior positions");
    for p in 1..=p_checkable.saturating_sub(0) {
        if p >= seg.differentials.len() {
            break;
        }
        let ker = seg.terms[p].total_dim - rank(&seg.differentials[p]);
        let im = rank(&seg.differentials[p - 1]);
        if ker != im {
            exact_ok = false;
            exact_detail = format!("at position {p}: dim ker = {ker}, dim im = {im}");
            break;
        }
    }
    checks.push(CheckResult {
        name: "exactness".into(),
        pass: exact_ok,
        detail: exact_detail,
    });

    // (v) module linearity of every differential
    let mut linear_ok = true;
    let mut linear_detail = String::from("all differentials are module maps");
    'outer: for (p, d) in seg.differentials.iter().enumerate() {
        // Block-diagonality over the vertex blocks.
        let (tp, tn) = (&seg.terms[p], &seg.terms[p + 1]);
        for i in 0..nv {
            for j in 0..nv {
                if i == j {
                    continue;
                }
                for r in 0..tn.dims[i] {
                    for c in 0..tp.dims[j] {
                        if !f.is_zero(d.at(tn.offsets[i] + r, tp.offsets[j] + c)) {
                            linear_ok = false;
                            linear_detail = format!("d_{p} mixes vertex blocks {i} and {j}");
                            break 'outer;
                        }
                    }
                }
            }
        }
        for ai in 0..ctx.quiver.num_arrows() {
            let lhs = d.mul(&tp.actions[ai]);
            let rhs = tn.actions[ai].mul(d);
            if lhs != rhs {
                linear_ok = false;
                linear_detail = format!(
                    "d_{p} does not intertwine the action of `{}`",
                    ctx.quiver.arrows[ai].name
                );
                break 'outer;
            }
        }
    }
    checks.push(CheckResult {
        name: "module-linearity".into(),
        pass: linear_ok,
        detail: linear_detail,
    });

    // (vi) injectivity of every term: Ext¹(S_i, term) = 0 by the oracle.
    let mut inj_ok = true;
    let mut inj_detail = String::from("Ext¹(S_i, C^p) = 0 for all simples and terms");
    'inj: for (p, term) in seg.terms.iter().enumerate() {
        for i in 0..nv {
            let s = crate::rep::to_module_form(&Representation::simple(Arc::clone(ctx), i));
            match crate::oracle::ext_dims_oracle(model, &s, term, 1) {
                Ok(dims) => {
                    if dims[1] != 0 {
                        inj_ok = false;
                        inj_detail =
                            format!("Ext¹(S_{i}, C^{p}) = {} ≠ 0", dims[1]);
                        break 'inj;
                    }
                }
                Err(e) => {
                    inj_ok = false;
                    inj_detail = format!("oracle failure on C^{p}: {e}");
                    break 'inj;
                }
            }
        }
    }
    checks.push(CheckResult {
        name: "term-injectivity".into(),
        pass: inj_ok,
        detail: inj_detail,
    });

    CoresolutionReport { checks }
}
