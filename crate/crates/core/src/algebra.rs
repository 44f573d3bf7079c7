//! The finite-dimensional quotient Λ = kQ/K and its associated graded slices
//! K^p/K^{p+1}.
//!
//! Everything is length-graded. Per degree, paths are bucketed into (head,
//! tail) sectors; the graded pieces of the relation ideal and its powers are
//! sector-pure subspaces of those path spans, computed by the recursion
//!
//! ```text
//! (K^p)_d = Σ_a a·(K^p)_{d-1}  +  Σ_g g·(K^{p-1})_{d-|g|},      (K^0)_d = all paths
//! ```
//!
//! Once a sector piece equals the whole path span it stays that way in every
//! higher degree, which keeps high-degree bookkeeping cheap.
//!
//! The slice A^p = K^p/K^{p+1} is finite-dimensional: modulo K^{p+1} every
//! element of K^p is a sum of products a_0·g_1·a_1···g_p·a_p with each a_i a
//! lift of a Λ-basis element (length ≤ N−1) and each g_i a generator (length
//! ≤ m), so A^p lives in degrees ≤ D_p = (p+1)(N−1) + p·m. The builder
//! verifies the emptiness margin (K^p)_d = (K^{p+1})_d for D_p < d ≤ D_p + m,
//! which propagates the bound to all higher degrees.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{quotient, Echelon, Insert, Mat, Subspace};
use crate::quiver::{Quiver, Relation, RelationSet, Twist, Word};

/// Immutable inputs defining an algebra: expanded quiver, relations, field.
///
/// Contexts exist independently of admissibility, so relation checking and
/// Hom computations work even when Λ would be infinite-dimensional.
#[derive(Debug)]
pub struct AlgebraContext<F: Field> {
    pub field: F,
    pub quiver: Quiver,
    pub relations: RelationSet<F>,
}

impl<F: Field> AlgebraContext<F> {
    /// Expands the twist and resolves relation words given by expanded-arrow
    /// names.
    pub fn new(
        field: F,
        quiver: &Quiver,
        twist: &Twist,
        relations: Vec<Vec<(F::Elem, Vec<String>)>>,
    ) -> Result<Arc<AlgebraContext<F>>> {
        let expanded = crate::quiver::expand_twist(quiver, twist)?;
        let mut generators = Vec::new();
        for rel in relations {
            let mut terms = Vec::new();
            for (coeff, names) in rel {
                let mut word: Word = Vec::with_capacity(names.len());
                for n in &names {
                    let idx = expanded
                        .arrow_index(n)
                        .ok_or_else(|| Error::SchemaViolation(format!("unknown arrow `{n}` in relation")))?;
                    word.push(idx);
                }
                terms.push((coeff, word));
            }
            generators.push(Relation::new(field, terms, &expanded)?);
        }
        Ok(Arc::new(AlgebraContext {
            field,
            quiver: expanded,
            relations: RelationSet::new(generators),
        }))
    }

    /// Context over an already-expanded quiver with validated relations.
    pub fn from_parts(field: F, quiver: Quiver, relations: RelationSet<F>) -> Arc<AlgebraContext<F>> {
        Arc::new(AlgebraContext {
            field,
            quiver,
            relations,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.quiver.num_vertices()
    }

    fn sector(&self, head: usize, tail: usize) -> usize {
        head * self.num_vertices() + tail
    }
}

/// A homogeneous, sector-pure vector in the degree-`deg` path span.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorVec<F: Field> {
    pub deg: usize,
    pub head: usize,
    pub tail: usize,
    pub coeffs: Vec<F::Elem>,
}

/// Paths of one degree, bucketed by sector.
struct Level {
    words: Vec<Vec<Word>>,
    index: Vec<HashMap<Word, usize>>,
}

/// A graded piece of an ideal power in one sector. `basis: None` means the
/// piece equals the whole sector span.
#[derive(Clone)]
struct SectorSpan<F: Field> {
    dim: usize,
    basis: Option<Mat<F>>,
}

struct Tables<F: Field> {
    levels: Vec<Level>,
    /// powers[p][d][sector]; powers[0] is the full path span.
    powers: Vec<Vec<Vec<SectorSpan<F>>>>,
}

impl<F: Field> Tables<F> {
    fn new() -> Self {
        Tables {
            levels: Vec::new(),
            powers: vec![Vec::new()],
        }
    }

    fn ensure_levels(&mut self, ctx: &AlgebraContext<F>, d_max: usize) {
        let nv = ctx.num_vertices();
        let ns = nv * nv;
        if self.levels.is_empty() {
            let mut words = vec![Vec::new(); ns];
            for v in 0..nv {
                words[ctx.sector(v, v)].push(Word::new());
            }
            self.levels.push(index_level(words));
        }
        while self.levels.len() <= d_max {
            let prev = self.levels.last().unwrap();
            let mut words = vec![Vec::new(); ns];
            for head in 0..nv {
                for tail in 0..nv {
                    for w in &prev.words[ctx.sector(head, tail)] {
                        for (ai, a) in ctx.quiver.arrows.iter().enumerate() {
                            if a.tail == head {
                                let mut nw = Word::with_capacity(w.len() + 1);
                                nw.push(ai);
                                nw.extend(w);
                                words[ctx.sector(a.head, tail)].push(nw);
                            }
                        }
                    }
                }
            }
            for ws in words.iter_mut() {
                ws.sort();
            }
            self.levels.push(index_level(words));
        }
    }

    fn word_count(&self, d: usize, sector: usize) -> usize {
        self.levels[d].words[sector].len()
    }

    /// Left-concatenation by an arrow: `a · v`.
    fn concat_left(&self, ctx: &AlgebraContext<F>, a: usize, v: &SectorVec<F>) -> SectorVec<F> {
        let f = ctx.field;
        let arrow = &ctx.quiver.arrows[a];
        assert_eq!(arrow.tail, v.head, "arrow does not compose with head");
        let d = v.deg + 1;
        let target = ctx.sector(arrow.head, v.tail);
        let source_words = &self.levels[v.deg].words[ctx.sector(v.head, v.tail)];
        let index = &self.levels[d].index[target];
        let mut coeffs = vec![f.zero(); self.levels[d].words[target].len()];
        for (wi, c) in v.coeffs.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let mut nw = Word::with_capacity(source_words[wi].len() + 1);
            nw.push(a);
            nw.extend(&source_words[wi]);
            let ti = index[&nw];
            coeffs[ti] = f.add(&coeffs[ti], c);
        }
        SectorVec {
            deg: d,
            head: arrow.head,
            tail: v.tail,
            coeffs,
        }
    }

    /// Right-concatenation by an arrow: `v · a`.
    fn concat_right(&self, ctx: &AlgebraContext<F>, v: &SectorVec<F>, a: usize) -> SectorVec<F> {
        let f = ctx.field;
        let arrow = &ctx.quiver.arrows[a];
        assert_eq!(arrow.head, v.tail, "arrow does not compose with tail");
        let d = v.deg + 1;
        let target = ctx.sector(v.head, arrow.tail);
        let source_words = &self.levels[v.deg].words[ctx.sector(v.head, v.tail)];
        let index = &self.levels[d].index[target];
        let mut coeffs = vec![f.zero(); self.levels[d].words[target].len()];
        for (wi, c) in v.coeffs.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let mut nw = source_words[wi].clone();
            nw.push(a);
            let ti = index[&nw];
            coeffs[ti] = f.add(&coeffs[ti], c);
        }
        SectorVec {
            deg: d,
            head: v.head,
            tail: arrow.tail,
            coeffs,
        }
    }

    /// Left multiplication of a path vector by a relation generator.
    fn concat_generator(
        &self,
        ctx: &AlgebraContext<F>,
        gen: &Relation<F>,
        v_deg: usize,
        v_sector_head: usize,
        v_tail: usize,
        v_coeffs: &[F::Elem],
    ) -> SectorVec<F> {
        let f = ctx.field;
        assert_eq!(gen.tail, v_sector_head);
        let d = v_deg + gen.len;
        let target = ctx.sector(gen.head, v_tail);
        let source_words = &self.levels[v_deg].words[ctx.sector(v_sector_head, v_tail)];
        let index = &self.levels[d].index[target];
        let mut coeffs = vec![f.zero(); self.levels[d].words[target].len()];
        for (wi, c) in v_coeffs.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            for (gc, gw) in &gen.terms {
                let mut nw = Word::with_capacity(gw.len() + source_words[wi].len());
                nw.extend(gw);
                nw.extend(&source_words[wi]);
                let ti = index[&nw];
                coeffs[ti] = f.add(&coeffs[ti], &f.mul(gc, c));
            }
        }
        SectorVec {
            deg: d,
            head: gen.head,
            tail: v_tail,
            coeffs,
        }
    }

    /// Ensures powers[q][d'] exists for all q ≤ p_max, d' ≤ d_max.
    fn ensure_powers(&mut self, ctx: &AlgebraContext<F>, p_max: usize, d_max: usize) {
        self.ensure_levels(ctx, d_max);
        let nv = ctx.num_vertices();
        let ns = nv * nv;
        // Power 0 is the full path span.
        while self.powers[0].len() <= d_max {
            let d = self.powers[0].len();
            let spans = (0..ns)
                .map(|s| SectorSpan {
                    dim: self.word_count(d, s),
                    basis: None,
                })
                .collect();
            self.powers[0].push(spans);
        }
        for q in 1..=p_max {
            if self.powers.len() <= q {
                self.powers.push(Vec::new());
            }
            while self.powers[q].len() <= d_max {
                let d = self.powers[q].len();
                let spans = self.compute_power_degree(ctx, q, d);
                self.powers[q].push(spans);
            }
        }
    }

    fn compute_power_degree(&self, ctx: &AlgebraContext<F>, q: usize, d: usize) -> Vec<SectorSpan<F>> {
        let f = ctx.field;
        let nv = ctx.num_vertices();
        let ns = nv * nv;
        let mut out = Vec::with_capacity(ns);
        for s in 0..ns {
            let (head, tail) = (s / nv, s % nv);
            let nwords = self.word_count(d, s);
            if d == 0 || nwords == 0 {
                out.push(SectorSpan {
                    dim: 0,
                    basis: Some(Mat::zero(f, 0, nwords)),
                });
                continue;
            }
            // Fullness propagates: if every arrow-prefixed source is full,
            // the whole sector span is reached.
            let all_sources_full = ctx
                .quiver
                .arrows
                .iter()
                .filter(|a| a.head == head)
                .all(|a| {
                    let src = &self.powers[q][d - 1][ctx.sector(a.tail, tail)];
                    src.basis.is_none() || src.dim == self.word_count(d - 1, ctx.sector(a.tail, tail))
                });
            if all_sources_full && ctx.quiver.arrows.iter().any(|a| a.head == head) {
                out.push(SectorSpan {
                    dim: nwords,
                    basis: None,
                });
                continue;
            }
            let mut ech = Echelon::new(f, nwords);
            // a · (K^q)_{d-1}
            for (ai, a) in ctx.quiver.arrows.iter().enumerate() {
                if a.head != head {
                    continue;
                }
                let src_sector = ctx.sector(a.tail, tail);
                let src = &self.powers[q][d - 1][src_sector];
                for row in self.span_rows(f, d - 1, src_sector, src) {
                    let v = SectorVec {
                        deg: d - 1,
                        head: a.tail,
                        tail,
                        coeffs: row,
                    };
                    ech.insert_untracked(self.concat_left(ctx, ai, &v).coeffs);
                }
            }
            // g · (K^{q-1})_{d-|g|}
            for gen in &ctx.relations.generators {
                if gen.head != head || gen.len > d {
                    continue;
                }
                let src_deg = d - gen.len;
                let src_sector = ctx.sector(gen.tail, tail);
                let src = &self.powers[q - 1][src_deg][src_sector];
                for row in self.span_rows(f, src_deg, src_sector, src) {
                    let v = self.concat_generator(ctx, gen, src_deg, gen.tail, tail, &row);
                    ech.insert_untracked(v.coeffs);
                }
            }
            let dim = ech.rank();
            let basis = if dim == nwords {
                None
            } else if dim == 0 {
                Some(Mat::zero(f, 0, nwords))
            } else {
                Some(Mat::from_rows(f, ech.rows_sorted()))
            };
            out.push(SectorSpan { dim, basis });
        }
        out
    }

    /// Iterates basis rows of a sector span, materializing unit vectors for
    /// full spans.
    fn span_rows(&self, f: F, d: usize, sector: usize, span: &SectorSpan<F>) -> Vec<Vec<F::Elem>> {
        match &span.basis {
            Some(m) => m.row_vecs().map(|r| r.to_vec()).collect(),
            None => {
                let n = self.word_count(d, sector);
                (0..n)
                    .map(|i| {
                        let mut v = vec![f.zero(); n];
                        v[i] = f.one();
                        v
                    })
                    .collect()
            }
        }
    }
}

fn index_level(words: Vec<Vec<Word>>) -> Level {
    let index = words
        .iter()
        .map(|ws| {
            ws.iter()
                .enumerate()
                .map(|(i, w)| (w.clone(), i))
                .collect::<HashMap<_, _>>()
        })
        .collect();
    Level { words, index }
}

/// One basis element of Λ: a normal-form path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LamEntry {
    pub deg: usize,
    pub head: usize,
    pub tail: usize,
    pub word: Word,
}

struct LambdaDegree<F: Field> {
    /// Per sector: path indices of the normal-form representatives.
    reps: Vec<Vec<usize>>,
    /// Per sector: projection from sector path coordinates onto the
    /// representatives' quotient coordinates.
    proj: Vec<Mat<F>>,
}

/// The built algebra: graded Λ-bases, projections and multiplication data,
/// plus lazily extended ideal-power tables used by the graded slices.
pub struct AlgebraModel<F: Field> {
    ctx: Arc<AlgebraContext<F>>,
    pub nilpotency: usize,
    pub max_rel_len: usize,
    degree_budget: usize,
    lambda: Vec<LambdaDegree<F>>,
    entries: Vec<LamEntry>,
    /// (deg, sector) -> global offset of that block in the Λ basis.
    block_offsets: HashMap<(usize, usize), usize>,
    left_mul: Vec<Mat<F>>,
    right_mul: Vec<Mat<F>>,
    tables: Mutex<Tables<F>>,
    slices: Mutex<BTreeMap<usize, Arc<GradedSlice<F>>>>,
}

/// Builds Λ = kQ/K, failing with `NotAdmissible` when no nilpotency index
/// N ≤ max_degree exists.
pub fn build_algebra<F: Field>(
    ctx: Arc<AlgebraContext<F>>,
    max_degree: usize,
) -> Result<AlgebraModel<F>> {
    let f = ctx.field;
    let nv = ctx.num_vertices();
    let ns = nv * nv;
    let mut tables = Tables::new();
    let mut lambda: Vec<LambdaDegree<F>> = Vec::new();
    let mut nilpotency = None;
    for d in 0..=max_degree {
        tables.ensure_powers(&ctx, 1, d);
        let mut reps = vec![Vec::new(); ns];
        let mut proj = Vec::with_capacity(ns);
        let mut total = 0usize;
        for s in 0..ns {
            let nwords = tables.word_count(d, s);
            let piece = &tables.powers[1][d][s];
            let sub = match &piece.basis {
                Some(m) => Subspace::new(nwords, m.clone()),
                None => Subspace::full(f, nwords),
            };
            let (rep_space, projection) = quotient(nwords, &sub);
            // Representatives from `quotient` are standard basis vectors,
            // i.e. normal-form paths.
            for r in rep_space.basis.row_vecs() {
                let idx = r.iter().position(|e| !f.is_zero(e)).unwrap();
                reps[s].push(idx);
            }
            total += rep_space.dim();
            proj.push(projection);
        }
        if total == 0 {
            nilpotency = Some(d);
            break;
        }
        lambda.push(LambdaDegree { reps, proj });
    }
    let nilpotency = nilpotency.ok_or(Error::NotAdmissible(max_degree))?;
    let max_rel_len = ctx.relations.max_len();

    // Flattened Λ basis, ordered by (degree, sector, position).
    let mut entries = Vec::new();
    let mut block_offsets = HashMap::new();
    for (d, ld) in lambda.iter().enumerate() {
        for s in 0..ns {
            block_offsets.insert((d, s), entries.len());
            for &wi in &ld.reps[s] {
                entries.push(LamEntry {
                    deg: d,
                    head: s / nv,
                    tail: s % nv,
                    word: tables.levels[d].words[s][wi].clone(),
                });
            }
        }
    }

    let mut model = AlgebraModel {
        ctx,
        nilpotency,
        max_rel_len,
        degree_budget: 64,
        lambda,
        entries,
        block_offsets,
        left_mul: Vec::new(),
        right_mul: Vec::new(),
        tables: Mutex::new(tables),
        slices: Mutex::new(BTreeMap::new()),
    };
    model.build_multiplication();
    Ok(model)
}

impl<F: Field> AlgebraModel<F> {
    pub fn context(&self) -> &Arc<AlgebraContext<F>> {
        &self.ctx
    }

    pub fn field(&self) -> F {
        self.ctx.field
    }

    pub fn quiver(&self) -> &Quiver {
        &self.ctx.quiver
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[LamEntry] {
        &self.entries
    }

    /// Dimension of the degree-d piece of Λ.
    pub fn lambda_dim(&self, d: usize) -> usize {
        if d >= self.nilpotency {
            0
        } else {
            self.lambda[d].reps.iter().map(|r| r.len()).sum()
        }
    }

    pub fn paths_dim(&self, d: usize) -> usize {
        let mut t = self.tables.lock().unwrap();
        t.ensure_levels(&self.ctx, d);
        let ns = self.ctx.num_vertices() * self.ctx.num_vertices();
        (0..ns).map(|s| t.word_count(d, s)).sum()
    }

    /// (K^p)_d as a subspace of the flattened degree-d path span.
    pub fn ideal_graded_piece(&self, p: usize, d: usize) -> Subspace<F> {
        let f = self.field();
        let mut t = self.tables.lock().unwrap();
        t.ensure_powers(&self.ctx, p, d);
        let nv = self.ctx.num_vertices();
        let ns = nv * nv;
        let sector_sizes: Vec<usize> = (0..ns).map(|s| t.word_count(d, s)).collect();
        let ambient: usize = sector_sizes.iter().sum();
        let mut rows = Vec::new();
        let mut offset = 0usize;
        for s in 0..ns {
            let span = t.powers[p][d][s].clone();
            for r in t.span_rows(f, d, s, &span) {
                let mut v = vec![f.zero(); ambient];
                v[offset..offset + sector_sizes[s]].clone_from_slice(&r);
                rows.push(v);
            }
            offset += sector_sizes[s];
        }
        if rows.is_empty() {
            Subspace::zero(f, ambient)
        } else {
            Subspace::new(ambient, Mat::from_rows(f, rows))
        }
    }

    /// Dimension of (K^p)_d.
    pub fn ideal_piece_dim(&self, p: usize, d: usize) -> usize {
        let mut t = self.tables.lock().unwrap();
        t.ensure_powers(&self.ctx, p, d);
        let ns = self.ctx.num_vertices() * self.ctx.num_vertices();
        (0..ns).map(|s| t.powers[p][d][s].dim).sum()
    }

    /// Projects a path vector into global Λ coordinates.
    pub fn project_to_lambda(&self, v: &SectorVec<F>) -> Vec<F::Elem> {
        let f = self.field();
        let mut out = vec![f.zero(); self.dim()];
        if v.deg >= self.nilpotency {
            return out;
        }
        let s = self.ctx.sector(v.head, v.tail);
        let local = self.lambda[v.deg].proj[s].mul_vec(&v.coeffs);
        let off = self.block_offsets[&(v.deg, s)];
        out[off..off + local.len()].clone_from_slice(&local);
        out
    }

    /// Product of two Λ basis elements, in global Λ coordinates.
    pub fn mul_basis(&self, i: usize, j: usize) -> Vec<F::Elem> {
        let f = self.field();
        let (a, b) = (&self.entries[i], &self.entries[j]);
        if a.tail != b.head || a.deg + b.deg >= self.nilpotency {
            return vec![f.zero(); self.dim()];
        }
        let d = a.deg + b.deg;
        let mut word = a.word.clone();
        word.extend(&b.word);
        let t = self.tables.lock().unwrap();
        let s = self.ctx.sector(a.head, b.tail);
        let wi = t.levels[d].index[s][&word];
        let mut coeffs = vec![f.zero(); t.word_count(d, s)];
        coeffs[wi] = f.one();
        drop(t);
        self.project_to_lambda(&SectorVec {
            deg: d,
            head: a.head,
            tail: b.tail,
            coeffs,
        })
    }

    fn build_multiplication(&mut self) {
        let f = self.field();
        let n = self.dim();
        let arrows = self.ctx.quiver.arrows.clone();
        let mut left = Vec::with_capacity(arrows.len());
        let mut right = Vec::with_capacity(arrows.len());
        for (ai, arrow) in arrows.iter().enumerate() {
            let mut lm = Mat::zero(f, n, n);
            let mut rm = Mat::zero(f, n, n);
            for (col, e) in self.entries.iter().enumerate() {
                if arrow.tail == e.head && e.deg + 1 < self.nilpotency {
                    let v = {
                        let t = self.tables.lock().unwrap();
                        let s = self.ctx.sector(e.head, e.tail);
                        let wi = t.levels[e.deg].index[s][&e.word];
                        let mut coeffs = vec![f.zero(); t.word_count(e.deg, s)];
                        coeffs[wi] = f.one();
                        t.concat_left(
                            &self.ctx,
                            ai,
                            &SectorVec {
                                deg: e.deg,
                                head: e.head,
                                tail: e.tail,
                                coeffs,
                            },
                        )
                    };
                    for (r, c) in self.project_to_lambda(&v).into_iter().enumerate() {
                        *lm.at_mut(r, col) = c;
                    }
                }
                if arrow.head == e.tail && e.deg + 1 < self.nilpotency {
                    let v = {
                        let t = self.tables.lock().unwrap();
                        let s = self.ctx.sector(e.head, e.tail);
                        let wi = t.levels[e.deg].index[s][&e.word];
                        let mut coeffs = vec![f.zero(); t.word_count(e.deg, s)];
                        coeffs[wi] = f.one();
                        t.concat_right(
                            &self.ctx,
                            &SectorVec {
                                deg: e.deg,
                                head: e.head,
                                tail: e.tail,
                                coeffs,
                            },
                            ai,
                        )
                    };
                    for (r, c) in self.project_to_lambda(&v).into_iter().enumerate() {
                        *rm.at_mut(r, col) = c;
                    }
                }
            }
            left.push(lm);
            right.push(rm);
        }
        self.left_mul = left;
        self.right_mul = right;
    }

    /// Left multiplication by an arrow on the Λ basis.
    pub fn left_mul(&self, arrow: usize) -> &Mat<F> {
        &self.left_mul[arrow]
    }

    /// Right multiplication by an arrow on the Λ basis.
    pub fn right_mul(&self, arrow: usize) -> &Mat<F> {
        &self.right_mul[arrow]
    }

    /// Left multiplication by the idempotent e_i (a 0/1 diagonal mask).
    pub fn idempotent_left(&self, i: usize) -> Mat<F> {
        let f = self.field();
        let n = self.dim();
        let mut m = Mat::zero(f, n, n);
        for (k, e) in self.entries.iter().enumerate() {
            if e.head == i {
                *m.at_mut(k, k) = f.one();
            }
        }
        m
    }

    pub fn idempotent_right(&self, j: usize) -> Mat<F> {
        let f = self.field();
        let n = self.dim();
        let mut m = Mat::zero(f, n, n);
        for (k, e) in self.entries.iter().enumerate() {
            if e.tail == j {
                *m.at_mut(k, k) = f.one();
            }
        }
        m
    }

    /// Left concatenation by an arrow on raw path vectors.
    pub fn concat_arrow_left(&self, arrow: usize, v: &SectorVec<F>) -> SectorVec<F> {
        let mut t = self.tables.lock().unwrap();
        t.ensure_levels(&self.ctx, v.deg + 1);
        t.concat_left(&self.ctx, arrow, v)
    }

    /// The path words spanning one degree sector, in coordinate order.
    pub fn words(&self, deg: usize, head: usize, tail: usize) -> Vec<crate::quiver::Word> {
        let mut t = self.tables.lock().unwrap();
        t.ensure_levels(&self.ctx, deg);
        t.levels[deg].words[self.ctx.sector(head, tail)].clone()
    }

    /// The graded slice A^p = K^p/K^{p+1}, memoized per power.
    pub fn slice(&self, p: usize) -> Result<Arc<GradedSlice<F>>> {
        if let Some(s) = self.slices.lock().unwrap().get(&p) {
            return Ok(Arc::clone(s));
        }
        let s = Arc::new(self.build_slice(p)?);
        self.slices
            .lock()
            .unwrap()
            .insert(p, Arc::clone(&s));
        Ok(s)
    }

    pub fn cutoff(&self, p: usize) -> usize {
        (p + 1) * (self.nilpotency - 1) + p * self.max_rel_len
    }

    fn build_slice(&self, p: usize) -> Result<GradedSlice<F>> {
        let f = self.field();
        let nv = self.ctx.num_vertices();
        let cutoff = self.cutoff(p);
        let margin = self.max_rel_len;
        let reach = cutoff + margin.max(1);
        if reach > self.degree_budget {
            return Err(Error::CutoffExceeded(self.degree_budget));
        }
        let mut t = self.tables.lock().unwrap();
        t.ensure_powers(&self.ctx, p + 1, reach);

        // Emptiness margin: beyond the cutoff the two consecutive powers
        // agree degreewise, so the slice vanishes in all higher degrees.
        for d in cutoff + 1..=cutoff + margin {
            let ns = nv * nv;
            for s in 0..ns {
                assert_eq!(
                    t.powers[p][d][s].dim,
                    t.powers[p + 1][d][s].dim,
                    "graded slice cutoff violated at power {p}, degree {d}"
                );
            }
        }

        let mut entries = Vec::new();
        let mut lifts: Vec<SectorVec<F>> = Vec::new();
        let mut offsets = HashMap::new();
        let mut proj = HashMap::new();
        let mut knext_basis = HashMap::new();
        for d in 0..=cutoff {
            for head in 0..nv {
                for tail in 0..nv {
                    let s = self.ctx.sector(head, tail);
                    let nwords = t.word_count(d, s);
                    let sub = t.powers[p + 1][d][s].clone();
                    let sup = t.powers[p][d][s].clone();
                    if sup.dim == sub.dim {
                        continue;
                    }
                    let mut ech = Echelon::new(f, nwords);
                    let sub_rows = t.span_rows(f, d, s, &sub);
                    for r in &sub_rows {
                        ech.insert_untracked(r.clone());
                    }
                    let mut local = Vec::new();
                    for r in t.span_rows(f, d, s, &sup) {
                        if let Insert::Independent(_) = ech.insert_tracked(r.clone()) {
                            local.push(SectorVec {
                                deg: d,
                                head,
                                tail,
                                coeffs: r,
                            });
                        }
                    }
                    assert_eq!(local.len(), sup.dim - sub.dim);
                    offsets.insert((d, head, tail), entries.len());
                    for v in local {
                        entries.push(SliceEntry { deg: d, head, tail });
                        lifts.push(v);
                    }
                    proj.insert((d, head, tail), ProjData { ech });
                    knext_basis.insert(
                        (d, head, tail),
                        Mat::from_rows(f, sub_rows.clone()).clone_or_empty(f, nwords),
                    );
                }
            }
        }
        drop(t);

        let mut slice = GradedSlice {
            power: p,
            cutoff,
            field: f,
            nv,
            entries,
            offsets,
            lifts,
            proj,
            knext_basis,
            left_act: Vec::new(),
            right_act: Vec::new(),
        };
        self.build_slice_actions(&mut slice);
        Ok(slice)
    }

    fn build_slice_actions(&self, slice: &mut GradedSlice<F>) {
        let f = self.field();
        let n = slice.dim();
        let arrows = self.ctx.quiver.arrows.clone();
        let mut left = Vec::with_capacity(arrows.len());
        let mut right = Vec::with_capacity(arrows.len());
        for (ai, arrow) in arrows.iter().enumerate() {
            let mut lm = Mat::zero(f, n, n);
            let mut rm = Mat::zero(f, n, n);
            for col in 0..n {
                let e = &slice.entries[col];
                let lift = &slice.lifts[col];
                if arrow.tail == e.head && e.deg + 1 <= slice.cutoff {
                    let t = self.tables.lock().unwrap();
                    let v = t.concat_left(&self.ctx, ai, lift);
                    drop(t);
                    for (r, c) in slice.project(&v).into_iter().enumerate() {
                        *lm.at_mut(r, col) = c;
                    }
                }
                if arrow.head == e.tail && e.deg + 1 <= slice.cutoff {
                    let t = self.tables.lock().unwrap();
                    let v = t.concat_right(&self.ctx, lift, ai);
                    drop(t);
                    for (r, c) in slice.project(&v).into_iter().enumerate() {
                        *rm.at_mut(r, col) = c;
                    }
                }
            }
            left.push(lm);
            right.push(rm);
        }
        slice.left_act = left;
        slice.right_act = right;
    }
}

trait CloneOrEmpty<F: Field> {
    fn clone_or_empty(self, f: F, ncols: usize) -> Mat<F>;
}

impl<F: Field> CloneOrEmpty<F> for Mat<F> {
    fn clone_or_empty(self, f: F, ncols: usize) -> Mat<F> {
        if self.rows == 0 {
            Mat::zero(f, 0, ncols)
        } else {
            self
        }
    }
}

/// Position of one basis element of a graded slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceEntry {
    pub deg: usize,
    pub head: usize,
    pub tail: usize,
}

struct ProjData<F: Field> {
    ech: Echelon<F>,
}

/// The bimodule A^p = K^p/K^{p+1}, with degreewise lift representatives,
/// projections, and arrow actions on both sides.
pub struct GradedSlice<F: Field> {
    pub power: usize,
    pub cutoff: usize,
    field: F,
    nv: usize,
    entries: Vec<SliceEntry>,
    offsets: HashMap<(usize, usize, usize), usize>,
    lifts: Vec<SectorVec<F>>,
    proj: HashMap<(usize, usize, usize), ProjData<F>>,
    /// Bases of (K^{p+1})_d per (deg, head, tail), for complement choices.
    knext_basis: HashMap<(usize, usize, usize), Mat<F>>,
    left_act: Vec<Mat<F>>,
    right_act: Vec<Mat<F>>,
}

impl<F: Field> GradedSlice<F> {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[SliceEntry] {
        &self.entries
    }

    pub fn lift(&self, idx: usize) -> &SectorVec<F> {
        &self.lifts[idx]
    }

    /// Projects a vector lying in (K^p)_d into slice coordinates. Vectors in
    /// degrees beyond the cutoff project to zero.
    pub fn project(&self, v: &SectorVec<F>) -> Vec<F::Elem> {
        let f = self.field;
        let mut out = vec![f.zero(); self.dim()];
        let key = (v.deg, v.head, v.tail);
        let Some(p) = self.proj.get(&key) else {
            return out;
        };
        let (residual, track) = p.ech.reduce(v.coeffs.clone());
        assert!(residual.is_none(), "vector is not in the ideal power");
        let off = self.offsets[&key];
        out[off..off + track.len()].clone_from_slice(&track);
        out
    }

    /// Splits `v ∈ (K^p)_d` as (part in K^{p+1}, coefficients over the
    /// complement representatives), using the slice's own lift complement.
    pub fn split_default(&self, v: &SectorVec<F>) -> (SectorVec<F>, Vec<F::Elem>) {
        let f = self.field;
        let key = (v.deg, v.head, v.tail);
        match self.proj.get(&key) {
            None => (v.clone(), Vec::new()),
            Some(p) => {
                let (residual, track) = p.ech.reduce(v.coeffs.clone());
                assert!(residual.is_none(), "vector is not in the ideal power");
                let off = self.offsets[&key];
                let mut rest = v.clone();
                for (local, c) in track.iter().enumerate() {
                    if f.is_zero(c) {
                        continue;
                    }
                    let lift = &self.lifts[off + local];
                    for (k, e) in lift.coeffs.iter().enumerate() {
                        rest.coeffs[k] = f.sub_mul(&rest.coeffs[k], c, e);
                    }
                }
                (rest, track)
            }
        }
    }

    /// Left action of an arrow in slice coordinates (degree +1).
    pub fn left_action(&self, arrow: usize) -> &Mat<F> {
        &self.left_act[arrow]
    }

    /// Right action of an arrow in slice coordinates (degree +1).
    pub fn right_action(&self, arrow: usize) -> &Mat<F> {
        &self.right_act[arrow]
    }

    /// Diagonal projector onto entries with the given head vertex.
    pub fn head_projector(&self, i: usize) -> Mat<F> {
        let f = self.field;
        let n = self.dim();
        let mut m = Mat::zero(f, n, n);
        for (k, e) in self.entries.iter().enumerate() {
            if e.head == i {
                *m.at_mut(k, k) = f.one();
            }
        }
        m
    }

    /// Diagonal projector onto entries with the given tail vertex.
    pub fn tail_projector(&self, j: usize) -> Mat<F> {
        let f = self.field;
        let n = self.dim();
        let mut m = Mat::zero(f, n, n);
        for (k, e) in self.entries.iter().enumerate() {
            if e.tail == j {
                *m.at_mut(k, k) = f.one();
            }
        }
        m
    }

    pub fn num_vertices(&self) -> usize {
        self.nv
    }

    /// Basis of (K^{p+1})_d in the given sector, when the slice stores it.
    pub fn knext_basis(&self, deg: usize, head: usize, tail: usize) -> Option<&Mat<F>> {
        self.knext_basis.get(&(deg, head, tail))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::quiver::Twist;

    fn jordan_ctx(relation_power: usize) -> Arc<AlgebraContext<Rationals>> {
        let f = Rationals;
        let q = Quiver::new(
            vec!["1".into()],
            vec![("x".into(), "1".into(), "1".into())],
        )
        .unwrap();
        let rels = if relation_power == 0 {
            vec![]
        } else {
            vec![vec![(f.one(), vec!["x".to_string(); relation_power])]]
        };
        AlgebraContext::new(f, &q, &Twist::trivial(&q), rels).unwrap()
    }

    pub fn two_loop_ctx(rels: &[&[(i64, &[&str])]]) -> Arc<AlgebraContext<Rationals>> {
        let f = Rationals;
        let q = Quiver::new(
            vec!["1".into()],
            vec![
                ("x".into(), "1".into(), "1".into()),
                ("y".into(), "1".into(), "1".into()),
            ],
        )
        .unwrap();
        let rels = rels
            .iter()
            .map(|r| {
                r.iter()
                    .map(|(c, w)| (f.from_i64(*c), w.iter().map(|s| s.to_string()).collect()))
                    .collect()
            })
            .collect();
        AlgebraContext::new(f, &q, &Twist::trivial(&q), rels).unwrap()
    }

    #[test]
    fn jordan_x2_model() {
        let model = build_algebra(jordan_ctx(2), 10).unwrap();
        assert_eq!(model.dim(), 2);
        assert_eq!(model.nilpotency, 2);
        assert_eq!(model.lambda_dim(0), 1);
        assert_eq!(model.lambda_dim(1), 1);
        assert_eq!(model.lambda_dim(2), 0);
    }

    #[test]
    fn commutative_nilpotent_model() {
        let ctx = two_loop_ctx(&[
            &[(1, &["x", "y"]), (-1, &["y", "x"])],
            &[(1, &["x", "x"])],
            &[(1, &["y", "y"])],
        ]);
        let model = build_algebra(ctx, 10).unwrap();
        assert_eq!(model.dim(), 4);
        assert_eq!(model.nilpotency, 3);
        // Basis {1, x, y, xy}: degree dims 1, 2, 1.
        assert_eq!(model.lambda_dim(0), 1);
        assert_eq!(model.lambda_dim(1), 2);
        assert_eq!(model.lambda_dim(2), 1);
    }

    #[test]
    fn commutator_only_is_not_admissible() {
        let ctx = two_loop_ctx(&[&[(1, &["x", "y"]), (-1, &["y", "x"])]]);
        assert!(matches!(
            build_algebra(ctx, 8),
            Err(Error::NotAdmissible(8))
        ));
    }

    #[test]
    fn ideal_graded_pieces_jordan() {
        let model = build_algebra(jordan_ctx(2), 10).unwrap();
        assert_eq!(model.ideal_graded_piece(1, 2).dim(), 1);
        assert_eq!(model.ideal_graded_piece(2, 4).dim(), 1);
        assert_eq!(model.ideal_graded_piece(2, 3).dim(), 0);
        assert_eq!(model.ideal_graded_piece(1, 1).dim(), 0);
    }

    #[test]
    fn commutator_graded_piece() {
        // With the commutator as the only generator the degree-2 piece of K
        // is the span of xy - yx.
        let ctx = two_loop_ctx(&[
            &[(1, &["x", "y"]), (-1, &["y", "x"])],
            &[(1, &["x", "x", "x"])],
            &[(1, &["y", "y", "y"])],
        ]);
        let f = Rationals;
        let model = build_algebra(ctx, 10).unwrap();
        let piece = model.ideal_graded_piece(1, 2);
        assert_eq!(piece.dim(), 1);
        // Path order in the single sector is xx, xy, yx, yy.
        let commutator = vec![f.zero(), f.one(), f.from_i64(-1), f.zero()];
        assert!(piece.contains(&commutator));
    }

    #[test]
    fn slice_dimensions_jordan() {
        let model = build_algebra(jordan_ctx(2), 10).unwrap();
        let a0 = model.slice(0).unwrap();
        assert_eq!(a0.dim(), 2);
        assert_eq!(a0.cutoff, 1);

        let a1 = model.slice(1).unwrap();
        assert_eq!(a1.dim(), 2);
        assert_eq!(a1.cutoff, 4);
        let degs: Vec<usize> = a1.entries().iter().map(|e| e.deg).collect();
        assert_eq!(degs, vec![2, 3]);

        let a2 = model.slice(2).unwrap();
        assert_eq!(a2.dim(), 2);
        assert_eq!(a2.cutoff, 7);
        let degs: Vec<usize> = a2.entries().iter().map(|e| e.deg).collect();
        assert_eq!(degs, vec![4, 5]);
    }

    #[test]
    fn degreewise_dimension_identity() {
        let ctx = two_loop_ctx(&[
            &[(1, &["x", "y"]), (-1, &["y", "x"])],
            &[(1, &["x", "x"])],
            &[(1, &["y", "y"])],
        ]);
        let model = build_algebra(ctx, 10).unwrap();
        for d in 0..model.nilpotency {
            assert_eq!(
                model.paths_dim(d),
                model.ideal_piece_dim(1, d) + model.lambda_dim(d)
            );
        }
    }

    #[test]
    fn multiplication_is_associative_and_respects_idempotents() {
        let ctx = two_loop_ctx(&[
            &[(1, &["x", "y"]), (-1, &["y", "x"])],
            &[(1, &["x", "x"])],
            &[(1, &["y", "y"])],
        ]);
        let model = build_algebra(ctx, 10).unwrap();
        let f = model.field();
        let n = model.dim();
        let mul_vec = |x: &Vec<num_rational::BigRational>, j: usize| -> Vec<_> {
            let mut out = vec![f.zero(); n];
            for (i, c) in x.iter().enumerate() {
                if f.is_zero(c) {
                    continue;
                }
                for (k, e) in model.mul_basis(i, j).iter().enumerate() {
                    out[k] = f.add(&out[k], &f.mul(c, e));
                }
            }
            out
        };
        for i in 0..n {
            for j in 0..n {
                let ij = model.mul_basis(i, j);
                for k in 0..n {
                    let ij_k = mul_vec(&ij, k);
                    let jk = model.mul_basis(j, k);
                    let mut i_jk = vec![f.zero(); n];
                    for (idx, c) in jk.iter().enumerate() {
                        if f.is_zero(c) {
                            continue;
                        }
                        for (t, e) in model.mul_basis(i, idx).iter().enumerate() {
                            i_jk[t] = f.add(&i_jk[t], &f.mul(c, e));
                        }
                    }
                    assert_eq!(ij_k, i_jk, "associativity fails at ({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn slice_lift_then_project_is_identity() {
        let model = build_algebra(jordan_ctx(2), 10).unwrap();
        let a1 = model.slice(1).unwrap();
        for i in 0..a1.dim() {
            let coords = a1.project(a1.lift(i));
            for (j, c) in coords.iter().enumerate() {
                assert_eq!(model.field().is_zero(c), i != j);
            }
        }
    }

    #[test]
    fn slice_actions_commute() {
        let ctx = two_loop_ctx(&[
            &[(1, &["x", "y"]), (-1, &["y", "x"])],
            &[(1, &["x", "x"])],
            &[(1, &["y", "y"])],
        ]);
        let model = build_algebra(ctx, 10).unwrap();
        let a1 = model.slice(1).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let lr = a1.left_action(a).mul(a1.right_action(b));
                let rl = a1.right_action(b).mul(a1.left_action(a));
                assert_eq!(lr, rl, "left and right actions must commute");
            }
        }
    }
}
