//! Quivers, twists, paths and homogeneous relation sets.
//!
//! A twist assigns a multiplicity to every arrow; over the ground field it is
//! equivalent to replacing each arrow by that many parallel arrows, which is
//! how all downstream machinery consumes it. Path words follow the function
//! composition convention: in a word `[a, b]` the arrow `b` acts first.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub tail: usize,
    pub head: usize,
}

/// A finite quiver: vertex labels and named arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    /// Builds a quiver from vertex labels and `(name, tail, head)` triples.
    pub fn new(vertices: Vec<String>, arrows: Vec<(String, String, String)>) -> Result<Quiver> {
        if vertices.is_empty() {
            return Err(Error::SchemaViolation("quiver has no vertices".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(Error::SchemaViolation(format!("duplicate vertex `{v}`")));
            }
        }
        let index: BTreeMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut named = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(arrows.len());
        for (name, tail, head) in arrows {
            let t = *index
                .get(tail.as_str())
                .ok_or_else(|| Error::SchemaViolation(format!("arrow `{name}`: unknown tail `{tail}`")))?;
            let h = *index
                .get(head.as_str())
                .ok_or_else(|| Error::SchemaViolation(format!("arrow `{name}`: unknown head `{head}`")))?;
            if !named.insert(name.clone()) {
                return Err(Error::SchemaViolation(format!("duplicate arrow `{name}`")));
            }
            out.push(Arrow {
                name,
                tail: t,
                head: h,
            });
        }
        Ok(Quiver {
            vertices,
            arrows: out,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }
}

/// Per-arrow multiplicities with chosen basis names for the expanded arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Twist {
    entries: BTreeMap<String, Vec<String>>,
}

impl Twist {
    pub fn new(entries: BTreeMap<String, Vec<String>>) -> Result<Twist> {
        for (arrow, names) in &entries {
            if names.is_empty() {
                return Err(Error::SchemaViolation(format!(
                    "twist entry for `{arrow}` must have rank at least 1"
                )));
            }
        }
        Ok(Twist { entries })
    }

    /// Rank 1 on every arrow, keeping the arrow names.
    pub fn trivial(q: &Quiver) -> Twist {
        Twist {
            entries: q
                .arrows
                .iter()
                .map(|a| (a.name.clone(), vec![a.name.clone()]))
                .collect(),
        }
    }

    pub fn rank(&self, arrow: &str) -> Option<usize> {
        self.entries.get(arrow).map(|n| n.len())
    }

    pub fn basis_names(&self, arrow: &str) -> Option<&[String]> {
        self.entries.get(arrow).map(|n| n.as_slice())
    }
}

/// Replaces each arrow by its twist-rank many parallel arrows.
pub fn expand_twist(q: &Quiver, t: &Twist) -> Result<Quiver> {
    let mut arrows = Vec::new();
    for a in &q.arrows {
        let names = t
            .basis_names(&a.name)
            .ok_or_else(|| Error::MissingTwistEntry(a.name.clone()))?;
        for n in names {
            arrows.push((
                n.clone(),
                q.vertices[a.tail].clone(),
                q.vertices[a.head].clone(),
            ));
        }
    }
    Quiver::new(q.vertices.clone(), arrows)
}

/// A composable word of arrow indices; `word[0]` acts last.
pub type Word = Vec<usize>;

/// A path: either a trivial path at a vertex or a nonempty word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub head: usize,
    pub tail: usize,
    pub word: Word,
}

impl Path {
    pub fn trivial(vertex: usize) -> Path {
        Path {
            head: vertex,
            tail: vertex,
            word: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn display(&self, q: &Quiver) -> String {
        if self.word.is_empty() {
            format!("e_{}", q.vertices[self.head])
        } else {
            self.word
                .iter()
                .map(|&a| q.arrows[a].name.as_str())
                .collect::<Vec<_>>()
                .join("*")
        }
    }
}

/// Checks composability and returns (head, tail) of a nonempty word.
pub fn word_endpoints(q: &Quiver, word: &[usize]) -> Option<(usize, usize)> {
    let first = *word.first()?;
    let mut prev = first;
    for &a in &word[1..] {
        if q.arrows[prev].tail != q.arrows[a].head {
            return None;
        }
        prev = a;
    }
    Some((q.arrows[first].head, q.arrows[prev].tail))
}

/// All composable words of length `d`, optionally filtered by endpoints.
/// `d = 0` yields the trivial paths.
pub fn enumerate_paths(q: &Quiver, d: usize, src: Option<usize>, tgt: Option<usize>) -> Vec<Path> {
    let keep = |p: &Path| src.map_or(true, |s| p.tail == s) && tgt.map_or(true, |t| p.head == t);
    let mut level: Vec<Path> = (0..q.num_vertices()).map(Path::trivial).collect();
    for _ in 0..d {
        let mut next = Vec::new();
        for p in &level {
            for (ai, a) in q.arrows.iter().enumerate() {
                if a.tail == p.head {
                    let mut word = Vec::with_capacity(p.len() + 1);
                    word.push(ai);
                    word.extend(&p.word);
                    next.push(Path {
                        head: a.head,
                        tail: p.tail,
                        word,
                    });
                }
            }
        }
        level = next;
    }
    level.retain(keep);
    level.sort_by(|a, b| a.word.cmp(&b.word).then(a.tail.cmp(&b.tail)));
    level
}

/// One homogeneous relation: a linear combination of parallel words.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation<F: Field> {
    pub terms: Vec<(F::Elem, Word)>,
    pub head: usize,
    pub tail: usize,
    pub len: usize,
}

impl<F: Field> Relation<F> {
    /// Validates length homogeneity (≥ 2), parallelism and composability.
    pub fn new(field: F, terms: Vec<(F::Elem, Word)>, q: &Quiver) -> Result<Relation<F>> {
        let describe = |terms: &[(F::Elem, Word)]| {
            terms
                .iter()
                .map(|(_, w)| {
                    w.iter()
                        .map(|&a| q.arrows[a].name.as_str())
                        .collect::<Vec<_>>()
                        .join("*")
                })
                .collect::<Vec<_>>()
                .join(", ")
        };
        let terms: Vec<(F::Elem, Word)> = terms
            .into_iter()
            .filter(|(c, _)| !field.is_zero(c))
            .collect();
        if terms.is_empty() {
            return Err(Error::SchemaViolation("relation has no nonzero terms".into()));
        }
        let len = terms[0].1.len();
        if len < 2 {
            return Err(Error::InhomogeneousRelation(format!(
                "words must have length at least 2: {}",
                describe(&terms)
            )));
        }
        let mut endpoints = None;
        for (_, w) in &terms {
            if w.len() != len {
                return Err(Error::InhomogeneousRelation(describe(&terms)));
            }
            let ep = word_endpoints(q, w).ok_or_else(|| {
                Error::SchemaViolation(format!("non-composable word in relation: {}", describe(&terms)))
            })?;
            match endpoints {
                None => endpoints = Some(ep),
                Some(e) if e != ep => {
                    return Err(Error::NonParallelRelation(describe(&terms)));
                }
                _ => {}
            }
        }
        let (head, tail) = endpoints.unwrap();
        Ok(Relation {
            terms,
            head,
            tail,
            len,
        })
    }
}

/// A validated set of relation generators over the expanded quiver.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationSet<F: Field> {
    pub generators: Vec<Relation<F>>,
}

impl<F: Field> RelationSet<F> {
    pub fn empty() -> RelationSet<F> {
        RelationSet {
            generators: Vec::new(),
        }
    }

    pub fn new(generators: Vec<Relation<F>>) -> RelationSet<F> {
        RelationSet { generators }
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Maximal generator word length, 0 when there are no relations.
    pub fn max_len(&self) -> usize {
        self.generators.iter().map(|r| r.len).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    pub fn jordan() -> Quiver {
        Quiver::new(
            vec!["1".into()],
            vec![("x".into(), "1".into(), "1".into())],
        )
        .unwrap()
    }

    fn kronecker() -> Quiver {
        Quiver::new(
            vec!["1".into(), "2".into()],
            vec![
                ("a".into(), "1".into(), "2".into()),
                ("b".into(), "1".into(), "2".into()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn trivial_twist_expansion_is_identity_shaped() {
        let q = kronecker();
        let t = Twist::trivial(&q);
        let e = expand_twist(&q, &t).unwrap();
        assert_eq!(e, q);
    }

    #[test]
    fn doubled_jordan_rank_2_3_has_five_loops() {
        let q = Quiver::new(
            vec!["1".into()],
            vec![
                ("x".into(), "1".into(), "1".into()),
                ("y".into(), "1".into(), "1".into()),
            ],
        )
        .unwrap();
        let t = Twist::new(
            [
                ("x".to_string(), vec!["x1".into(), "x2".into()]),
                ("y".to_string(), vec!["y1".into(), "y2".into(), "y3".into()]),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let e = expand_twist(&q, &t).unwrap();
        assert_eq!(e.num_vertices(), 1);
        assert_eq!(e.num_arrows(), 5);
        assert!(e.arrows.iter().all(|a| a.tail == 0 && a.head == 0));
    }

    #[test]
    fn kronecker_rank_2_on_one_arrow() {
        let q = kronecker();
        let t = Twist::new(
            [
                ("a".to_string(), vec!["a1".into(), "a2".into()]),
                ("b".to_string(), vec!["b".into()]),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let e = expand_twist(&q, &t).unwrap();
        assert_eq!(e.num_vertices(), 2);
        assert_eq!(e.num_arrows(), 3);
        assert!(e.arrows.iter().all(|a| a.tail == 0 && a.head == 1));
    }

    #[test]
    fn missing_twist_entry() {
        let q = kronecker();
        let t = Twist::new(
            [("a".to_string(), vec!["a".to_string()])].into_iter().collect(),
        )
        .unwrap();
        assert!(matches!(
            expand_twist(&q, &t),
            Err(Error::MissingTwistEntry(_))
        ));
    }

    #[test]
    fn path_enumeration() {
        let j = jordan();
        let trivial = enumerate_paths(&j, 0, None, None);
        assert_eq!(trivial.len(), 1);
        assert!(trivial[0].is_empty());

        let d3 = enumerate_paths(&j, 3, None, None);
        assert_eq!(d3.len(), 1);
        assert_eq!(d3[0].word, vec![0, 0, 0]);

        let k = kronecker();
        assert_eq!(enumerate_paths(&k, 0, None, None).len(), 2);
        assert!(enumerate_paths(&k, 2, None, None).is_empty());
        assert_eq!(enumerate_paths(&k, 1, Some(0), Some(1)).len(), 2);
        assert!(enumerate_paths(&k, 1, Some(1), Some(0)).is_empty());
    }

    #[test]
    fn relation_validation() {
        let f = Rationals;
        let q = Quiver::new(
            vec!["1".into()],
            vec![
                ("x".into(), "1".into(), "1".into()),
                ("y".into(), "1".into(), "1".into()),
            ],
        )
        .unwrap();
        // xy - yx is fine.
        let r = Relation::new(
            f,
            vec![
                (f.one(), vec![0, 1]),
                (f.from_i64(-1), vec![1, 0]),
            ],
            &q,
        )
        .unwrap();
        assert_eq!(r.len, 2);

        // Mixing lengths 2 and 3 is rejected.
        let bad = Relation::new(
            f,
            vec![(f.one(), vec![0, 0]), (f.one(), vec![0, 0, 0])],
            &q,
        );
        assert!(matches!(bad, Err(Error::InhomogeneousRelation(_))));

        // Length 1 is rejected.
        let bad = Relation::new(f, vec![(f.one(), vec![0])], &q);
        assert!(matches!(bad, Err(Error::InhomogeneousRelation(_))));

        // Non-parallel words are rejected.
        let k = Quiver::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![
                ("a".into(), "1".into(), "2".into()),
                ("b".into(), "2".into(), "3".into()),
                ("c".into(), "2".into(), "2".into()),
            ],
        )
        .unwrap();
        let bad = Relation::new(
            f,
            vec![(f.one(), vec![1, 0]), (f.one(), vec![2, 2])],
            &k,
        );
        assert!(matches!(bad, Err(Error::NonParallelRelation(_))));
    }
}
