//! The graph-manifold data model and its decidable structural predicates.
//!
//! A piece is a vertex datum (a truncated hyperbolic base times a torus
//! fiber); a gluing is an edge datum pairing two boundary tori through a
//! unimodular matrix. Only the linear part of each affine gluing is kept:
//! all predicates implemented here are fundamental-group level and depend
//! on the induced map only.
//!
//! Frame convention: in the frame of any boundary torus of a piece with
//! base dimension b and fiber dimension d (so b + d = n), coordinates
//! 0..b-1 are horospherical base directions and coordinates b-1..n-2 --
//! that is, the last d of the n-1 wall coordinates -- are the fiber
//! directions, with the same fiber basis shared by every boundary torus
//! of the piece. A gluing matrix maps the `from` frame to the `to` frame.
//! Traversing an edge in reverse uses the inverse matrix; note that the
//! induced identification of fiber generators is only canonical up to
//! sign, so predicates here never depend on a choice of orientation of
//! the fibers.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::manifest::Manifest;
use crate::matrix::IntMatrix;

/// A vertex datum: hyperbolic base dimension, torus fiber dimension, and
/// the named boundary tori (cusps).
#[derive(Clone, Debug)]
pub struct Piece {
    pub id: String,
    pub base_dim: usize,
    pub fiber_dim: usize,
    pub cusps: Vec<String>,
    /// Commensurability class of the base, user-supplied.
    pub label: Option<String>,
}

/// An edge datum: paired boundary tori plus the linear part of the affine
/// gluing, expressed from the `from` frame to the `to` frame.
#[derive(Clone, Debug)]
pub struct Gluing {
    pub from: (String, String),
    pub to: (String, String),
    pub matrix: IntMatrix,
}

/// A validated graph manifold: the decorated multigraph (loops and
/// parallel edges allowed) with global dimension n. Immutable after
/// validation; all predicates are pure.
#[derive(Clone, Debug)]
pub struct GraphManifold {
    pub n: usize,
    pub extended: bool,
    pub pieces: Vec<Piece>,
    pub gluings: Vec<Gluing>,
    piece_index: BTreeMap<String, usize>,
}

/// One side of a wall: a (piece, cusp) pair together with the fiber-last
/// frame convention of that boundary torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryTorusFrame {
    pub piece: usize,
}

impl Piece {
    /// Rank of the wall lattice on any boundary torus of this piece.
    pub fn wall_rank(&self) -> usize {
        self.base_dim + self.fiber_dim - 1
    }
}

fn unimodular(m: &IntMatrix) -> bool {
    m.is_unimodular()
}

/// Validate a parsed manifest, reporting every violated invariant (each
/// naming the offending element) rather than stopping at the first.
pub fn validate(manifest: &Manifest) -> Result<GraphManifold> {
    let mut errors: Vec<String> = Vec::new();
    let n = manifest.n;
    if n < 3 {
        errors.push(format!("ambient dimension n = {} must be at least 3", n));
    }

    let mut piece_index = BTreeMap::new();
    for (i, p) in manifest.pieces.iter().enumerate() {
        if piece_index.insert(p.id.clone(), i).is_some() {
            errors.push(format!("duplicate piece id {:?}", p.id));
        }
        if p.base_dim + p.fiber_dim != n {
            errors.push(format!(
                "piece {:?}: base_dim {} + fiber_dim {} != n = {}",
                p.id, p.base_dim, p.fiber_dim, n
            ));
        }
        if p.base_dim < 2 || (p.base_dim == 2 && !manifest.extended) {
            errors.push(format!(
                "piece {:?}: base_dim {} requires {} (surface pieces need the extended flag)",
                p.id,
                p.base_dim,
                if p.base_dim < 2 {
                    "base_dim >= 3"
                } else {
                    "\"extended\": true"
                }
            ));
        }
        if p.cusps.is_empty() {
            errors.push(format!("piece {:?} has no cusps", p.id));
        }
        let mut seen = BTreeSet::new();
        for c in &p.cusps {
            if !seen.insert(c) {
                errors.push(format!("piece {:?}: duplicate cusp id {:?}", p.id, c));
            }
        }
    }
    if manifest.pieces.is_empty() {
        errors.push("manifest has no pieces".into());
    }

    // each (piece, cusp) endpoint appears in at most one gluing
    let mut used: BTreeMap<(String, String), usize> = BTreeMap::new();
    for (k, g) in manifest.gluings.iter().enumerate() {
        for (end, name) in [(&g.from, "from"), (&g.to, "to")] {
            match piece_index.get(&end.0) {
                None => errors.push(format!(
                    "gluing {}: {} references unknown piece {:?}",
                    k, name, end.0
                )),
                Some(&pi) => {
                    if !manifest.pieces[pi].cusps.contains(&end.1) {
                        errors.push(format!(
                            "gluing {}: {} references unknown cusp {:?} of piece {:?}",
                            k, name, end.1, end.0
                        ));
                    }
                }
            }
            if let Some(prev) = used.insert(end.clone(), k) {
                errors.push(format!(
                    "cusp ({:?}, {:?}) used by gluings {} and {}",
                    end.0, end.1, prev, k
                ));
            }
        }
        if g.from == g.to {
            errors.push(format!(
                "gluing {} identifies a boundary torus with itself",
                k
            ));
        }
        if g.matrix.rows() != n - 1 || g.matrix.cols() != n - 1 {
            errors.push(format!(
                "gluing {}: matrix is {}x{}, expected {}x{}",
                k,
                g.matrix.rows(),
                g.matrix.cols(),
                n - 1,
                n - 1
            ));
        } else if !unimodular(&g.matrix) {
            errors.push(format!("gluing {}: non-unimodular matrix (|det| != 1)", k));
        }
    }

    // connectivity of the underlying multigraph
    if !manifest.pieces.is_empty() {
        let mut reached = vec![false; manifest.pieces.len()];
        let mut stack = vec![0usize];
        reached[0] = true;
        while let Some(v) = stack.pop() {
            for g in &manifest.gluings {
                if let (Some(&a), Some(&b)) = (piece_index.get(&g.from.0), piece_index.get(&g.to.0))
                {
                    for (x, y) in [(a, b), (b, a)] {
                        if x == v && !reached[y] {
                            reached[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
        }
        if let Some(i) = reached.iter().position(|&r| !r) {
            errors.push(format!(
                "graph is disconnected: piece {:?} is unreachable from {:?}",
                manifest.pieces[i].id, manifest.pieces[0].id
            ));
        }
    }

    if !errors.is_empty() {
        return Err(Error::Validation(errors));
    }

    let m = GraphManifold {
        n,
        extended: manifest.extended,
        pieces: manifest.pieces.clone(),
        gluings: manifest.gluings.clone(),
        piece_index,
    };

    // extended manifolds: a gluing between two surface pieces must not
    // identify the fibers
    if m.extended {
        for (k, g) in m.gluings.iter().enumerate() {
            let pf = &m.pieces[m.piece_index[&g.from.0]];
            let pt = &m.pieces[m.piece_index[&g.to.0]];
            if pf.base_dim == 2 && pt.base_dim == 2 {
                let image = m.fiber_lattice(m.piece_index[&g.from.0]).image(&g.matrix)?;
                if image == m.fiber_lattice(m.piece_index[&g.to.0]) {
                    errors.push(format!(
                        "gluing {} identifies the fibers of adjacent surface pieces {:?} and {:?}",
                        k, pf.id, pt.id
                    ));
                }
            }
        }
    }
    if !errors.is_empty() {
        return Err(Error::Validation(errors));
    }
    Ok(m)
}

/// Verdict plus hypothesis trail for one classified property.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PropertyVerdict {
    pub value: bool,
    pub hypotheses: Vec<String>,
}

fn verdict(value: bool, hypotheses: Vec<String>) -> PropertyVerdict {
    PropertyVerdict { value, hypotheses }
}

/// Group-property classification of a validated manifold. Every field is
/// decided from sufficient conditions on the decomposition; the
/// `sq_universal_guaranteed` field in particular reports only a
/// guarantee, not a decision procedure.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PropertyReport {
    pub simplicial_volume_zero: PropertyVerdict,
    /// Only populated when the ambient dimension is even.
    pub euler_char_zero_if_even_dim: Option<PropertyVerdict>,
    pub cstar_simple: PropertyVerdict,
    pub sq_universal_guaranteed: PropertyVerdict,
    pub relatively_hyperbolic: PropertyVerdict,
    pub thick_order_one: PropertyVerdict,
    pub cohopf_hypothesis: PropertyVerdict,
}

impl GraphManifold {
    pub fn piece_index(&self, id: &str) -> Result<usize> {
        self.piece_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown piece {:?}", id)))
    }

    /// Wall-lattice rank, the same for every wall.
    pub fn wall_rank(&self) -> usize {
        self.n - 1
    }

    /// The fiber sublattice of any boundary torus of `piece`, in that
    /// torus's own frame: the span of the last fiber_dim coordinates.
    pub fn fiber_lattice(&self, piece: usize) -> Lattice {
        let p = &self.pieces[piece];
        Lattice::coordinate_span(self.wall_rank(), p.base_dim - 1, self.wall_rank())
    }

    pub fn gluing_endpoints(&self, g: &Gluing) -> (usize, usize) {
        (self.piece_index[&g.from.0], self.piece_index[&g.to.0])
    }

    /// True iff the image of the `from` fiber meets the `to` fiber only in
    /// zero. The witness is the intersection lattice in the `to` frame.
    pub fn gluing_is_transverse(&self, gluing: usize) -> Result<(bool, Lattice)> {
        let g = self
            .gluings
            .get(gluing)
            .ok_or_else(|| Error::input(format!("no gluing with index {}", gluing)))?;
        let (from, to) = self.gluing_endpoints(g);
        let image = self.fiber_lattice(from).image(&g.matrix)?;
        let meet = image.intersect(&self.fiber_lattice(to))?;
        Ok((meet.is_zero(), meet))
    }

    /// True iff every gluing is transverse; otherwise lists the failures.
    pub fn is_irreducible(&self) -> Result<(bool, Vec<usize>)> {
        let mut failing = Vec::new();
        for k in 0..self.gluings.len() {
            if !self.gluing_is_transverse(k)?.0 {
                failing.push(k);
            }
        }
        Ok((failing.is_empty(), failing))
    }

    /// Some internal wall with transverse fibers. The two sides of a
    /// self-gluing count as a pair: the wall group still carries the two
    /// fiber-base splittings the property needs.
    pub fn has_transverse_pair(&self) -> Result<bool> {
        for k in 0..self.gluings.len() {
            if self.gluing_is_transverse(k)?.0 {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn internal_wall_count(&self) -> usize {
        self.gluings.len()
    }

    pub fn boundary_wall_count(&self) -> usize {
        let glued: BTreeSet<(String, String)> = self
            .gluings
            .iter()
            .flat_map(|g| [g.from.clone(), g.to.clone()])
            .collect();
        self.pieces
            .iter()
            .map(|p| {
                p.cusps
                    .iter()
                    .filter(|c| !glued.contains(&(p.id.clone(), (*c).clone())))
                    .count()
            })
            .sum()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_wall_count() == 0
    }

    /// Does some single gluing separate the graph? Loops and members of
    /// parallel families never do.
    pub fn has_separating_wall(&self) -> bool {
        for skip in 0..self.gluings.len() {
            let g = &self.gluings[skip];
            let (a, b) = self.gluing_endpoints(g);
            if a == b {
                continue;
            }
            let mut reached = vec![false; self.pieces.len()];
            let mut stack = vec![0usize];
            reached[0] = true;
            while let Some(v) = stack.pop() {
                for (k, h) in self.gluings.iter().enumerate() {
                    if k == skip {
                        continue;
                    }
                    let (x, y) = self.gluing_endpoints(h);
                    for (s, t) in [(x, y), (y, x)] {
                        if s == v && !reached[t] {
                            reached[t] = true;
                            stack.push(t);
                        }
                    }
                }
            }
            if reached.iter().any(|&r| !r) {
                return true;
            }
        }
        false
    }

    /// Classify the standard group properties of the fundamental group
    /// from the decomposition. Pure function of the validated structure.
    pub fn classify_properties(&self) -> Result<PropertyReport> {
        let all_fibers_nontrivial = self.pieces.iter().all(|p| p.fiber_dim >= 1);
        let some_trivial_fiber = !all_fibers_nontrivial;
        let (irreducible, _) = self.is_irreducible()?;
        let walls = self.internal_wall_count();
        let closed = self.is_closed();
        let transverse_pair = self.has_transverse_pair()?;
        let single = self.pieces.len() == 1;

        let fiber_trail = |v: bool| {
            vec![format!(
                "every piece has non-trivial fiber: {}",
                if v { "yes" } else { "no" }
            )]
        };

        let simplicial_volume_zero =
            verdict(all_fibers_nontrivial, fiber_trail(all_fibers_nontrivial));
        let euler_char_zero_if_even_dim = if self.n.is_multiple_of(2) {
            Some(verdict(
                all_fibers_nontrivial,
                fiber_trail(all_fibers_nontrivial),
            ))
        } else {
            None
        };

        let exceptional = single && walls == 0 && self.pieces[0].fiber_dim >= 1;
        let cstar_simple = verdict(
            irreducible && !exceptional,
            vec![
                format!("irreducible: {}", irreducible),
                format!(
                    "single piece with non-trivial fiber and no internal walls: {}",
                    exceptional
                ),
            ],
        );

        let separating = self.has_separating_wall();
        let sq = (irreducible && walls >= 2) || separating;
        let sq_universal_guaranteed = verdict(
            sq,
            vec![
                format!(
                    "irreducible with at least two internal walls: {}",
                    irreducible && walls >= 2
                ),
                format!("some internal wall separates: {}", separating),
            ],
        );

        let relatively_hyperbolic = verdict(
            some_trivial_fiber,
            vec![format!(
                "some piece has trivial fiber: {}",
                some_trivial_fiber
            )],
        );

        let thick = all_fibers_nontrivial && walls >= 1;
        let thick_order_one = verdict(
            thick,
            vec![
                format!(
                    "every piece has non-trivial fiber: {}",
                    all_fibers_nontrivial
                ),
                format!("at least one internal wall: {}", walls >= 1),
            ],
        );

        let cohopf = closed && transverse_pair;
        let cohopf_hypothesis = verdict(
            cohopf,
            vec![
                format!("closed: {}", closed),
                format!("has a transverse internal wall: {}", transverse_pair),
            ],
        );

        Ok(PropertyReport {
            simplicial_volume_zero,
            euler_char_zero_if_even_dim,
            cstar_simple,
            sq_universal_guaranteed,
            relatively_hyperbolic,
            thick_order_one,
            cohopf_hypothesis,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest;

    pub(crate) fn notqi_manifest() -> GraphManifold {
        // two copies of a 2-cusped hyperbolic 3-manifold base times T^2,
        // glued with the identity along one pair of cusps and with the
        // unipotent map (a, c, d) -> (a, c, c+d) along the other
        manifest::load(
            r#"{
            "n": 5,
            "pieces": [
                {"id": "V1", "base_dim": 3, "fiber_dim": 2, "cusps": ["A", "Ap"], "label": "N"},
                {"id": "V2", "base_dim": 3, "fiber_dim": 2, "cusps": ["A", "Ap"], "label": "N"}
            ],
            "gluings": [
                {"from": ["V1", "A"], "to": ["V2", "A"],
                 "matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]},
                {"from": ["V2", "Ap"], "to": ["V1", "Ap"],
                 "matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,1,1]]}
            ]
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn double_is_valid_closed_one_wall() {
        let m = manifest::load(
            r#"{
            "n": 4,
            "pieces": [
                {"id": "P1", "base_dim": 4, "fiber_dim": 0, "cusps": ["c"]},
                {"id": "P2", "base_dim": 4, "fiber_dim": 0, "cusps": ["c"]}
            ],
            "gluings": [
                {"from": ["P1", "c"], "to": ["P2", "c"], "matrix": [[1,0,0],[0,1,0],[0,0,1]]}
            ]
        }"#,
        )
        .unwrap();
        assert!(m.is_closed());
        assert_eq!(m.internal_wall_count(), 1);
        // zero fibers are trivially transverse
        assert!(m.is_irreducible().unwrap().0);
    }

    #[test]
    fn non_unimodular_rejected() {
        let err = manifest::load(
            r#"{
            "n": 4,
            "pieces": [
                {"id": "P1", "base_dim": 4, "fiber_dim": 0, "cusps": ["c"]},
                {"id": "P2", "base_dim": 4, "fiber_dim": 0, "cusps": ["c"]}
            ],
            "gluings": [
                {"from": ["P1", "c"], "to": ["P2", "c"], "matrix": [[2,0,0],[0,1,0],[0,0,1]]}
            ]
        }"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("non-unimodular"));
    }

    #[test]
    fn doubly_used_cusp_and_disconnection_rejected() {
        let err = manifest::load(
            r#"{
            "n": 4,
            "pieces": [
                {"id": "P1", "base_dim": 4, "fiber_dim": 0, "cusps": ["c"]},
                {"id": "P2", "base_dim": 4, "fiber_dim": 0, "cusps": ["c", "d"]}
            ],
            "gluings": [
                {"from": ["P1", "c"], "to": ["P2", "c"], "matrix": [[1,0,0],[0,1,0],[0,0,1]]},
                {"from": ["P1", "c"], "to": ["P2", "d"], "matrix": [[1,0,0],[0,1,0],[0,0,1]]}
            ]
        }"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("used by gluings"));

        let err = manifest::load(
            r#"{
            "n": 4,
            "pieces": [
                {"id": "P1", "base_dim": 4, "fiber_dim": 0, "cusps": ["c"]},
                {"id": "P2", "base_dim": 4, "fiber_dim": 0, "cusps": ["c"]}
            ],
            "gluings": []
        }"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("disconnected"));
    }

    #[test]
    fn notqi_is_valid_but_not_irreducible() {
        let m = notqi_manifest();
        assert!(m.is_closed());
        let (irr, failing) = m.is_irreducible().unwrap();
        assert!(!irr);
        // both gluings preserve the rank-2 fiber, so both fail
        assert_eq!(failing, vec![0, 1]);
        let (t, witness) = m.gluing_is_transverse(1).unwrap();
        assert!(!t);
        assert_eq!(witness.rank(), 2);
    }

    #[test]
    fn identity_gluing_with_positive_fibers_not_transverse() {
        let m = manifest::load(
            r#"{
            "n": 4,
            "pieces": [
                {"id": "P1", "base_dim": 3, "fiber_dim": 1, "cusps": ["c"]},
                {"id": "P2", "base_dim": 3, "fiber_dim": 1, "cusps": ["c"]}
            ],
            "gluings": [
                {"from": ["P1", "c"], "to": ["P2", "c"], "matrix": [[1,0,0],[0,1,0],[0,0,1]]}
            ]
        }"#,
        )
        .unwrap();
        let (t, witness) = m.gluing_is_transverse(0).unwrap();
        assert!(!t);
        assert_eq!(witness, m.fiber_lattice(1));
    }

    #[test]
    fn twisted_double_is_irreducible() {
        // f+ = f- + b with b = e1 != 0 in the base directions
        let m = manifest::load(
            r#"{
            "n": 4,
            "pieces": [
                {"id": "Vp", "base_dim": 3, "fiber_dim": 1, "cusps": ["c"]},
                {"id": "Vm", "base_dim": 3, "fiber_dim": 1, "cusps": ["c"]}
            ],
            "gluings": [
                {"from": ["Vp", "c"], "to": ["Vm", "c"], "matrix": [[1,0,1],[0,1,0],[0,0,1]]}
            ]
        }"#,
        )
        .unwrap();
        assert!(m.is_irreducible().unwrap().0);
        assert!(m.has_transverse_pair().unwrap());
    }

    #[test]
    fn transversality_symmetric_under_inverse() {
        let m = notqi_manifest();
        for k in 0..m.gluings.len() {
            let g = &m.gluings[k];
            let inv = g.matrix.inverse_unimodular().unwrap();
            let (from, to) = m.gluing_endpoints(g);
            let image = m.fiber_lattice(to).image(&inv).unwrap();
            let meet = image.intersect(&m.fiber_lattice(from)).unwrap();
            assert_eq!(meet.is_zero(), m.gluing_is_transverse(k).unwrap().0);
        }
    }

    #[test]
    fn surface_fiber_identification_rejected_under_extended_flag() {
        let text = r#"{
            "n": 4,
            "extended": true,
            "pieces": [
                {"id": "S1", "base_dim": 2, "fiber_dim": 2, "cusps": ["c"]},
                {"id": "S2", "base_dim": 2, "fiber_dim": 2, "cusps": ["c"]}
            ],
            "gluings": [
                {"from": ["S1", "c"], "to": ["S2", "c"], "matrix": [[1,0,0],[0,1,0],[0,0,1]]}
            ]
        }"#;
        let err = manifest::load(text).unwrap_err();
        assert!(err.to_string().contains("identifies the fibers"));
        // a fiber-transverse-ish gluing between surface pieces is accepted
        let ok = text.replace("[[1,0,0],[0,1,0],[0,0,1]]", "[[0,0,1],[1,0,0],[0,1,0]]");
        assert!(manifest::load(&ok).is_ok());
        // without the extended flag, surface pieces are rejected outright
        let noflag = text.replace("\"extended\": true,", "");
        assert!(manifest::load(&noflag)
            .unwrap_err()
            .to_string()
            .contains("extended"));
    }

    #[test]
    fn irreducibility_monotone_under_gluing_deletion() {
        // three pieces in a line plus a parallel edge, all transverse
        let text = r#"{
            "n": 4,
            "pieces": [
                {"id": "P0", "base_dim": 3, "fiber_dim": 1, "cusps": ["c0", "c1"]},
                {"id": "P1", "base_dim": 3, "fiber_dim": 1, "cusps": ["c0", "c1", "c2"]},
                {"id": "P2", "base_dim": 3, "fiber_dim": 1, "cusps": ["c0"]}
            ],
            "gluings": [
                {"from": ["P0", "c0"], "to": ["P1", "c0"], "matrix": [[1,0,1],[0,1,0],[0,0,1]]},
                {"from": ["P0", "c1"], "to": ["P1", "c1"], "matrix": [[1,0,1],[0,1,1],[0,0,1]]},
                {"from": ["P1", "c2"], "to": ["P2", "c0"], "matrix": [[1,0,1],[0,1,0],[0,0,1]]}
            ]
        }"#;
        let m = manifest::load(text).unwrap();
        assert!(m.is_irreducible().unwrap().0);
        // deleting either parallel edge keeps the graph connected; the
        // submanifold stays irreducible
        for skip in [0usize, 1] {
            let mut manifest = crate::manifest::parse(text).unwrap();
            manifest.gluings.remove(skip);
            let smaller = validate(&manifest).unwrap();
            assert!(smaller.is_irreducible().unwrap().0);
        }
    }

    #[test]
    fn classification_order_independent() {
        let m = notqi_manifest();
        let report = m.classify_properties().unwrap();
        // permute pieces and gluings in the manifest; verdicts must agree
        let permuted = manifest::load(
            r#"{
            "n": 5,
            "pieces": [
                {"id": "V2", "base_dim": 3, "fiber_dim": 2, "cusps": ["A", "Ap"], "label": "N"},
                {"id": "V1", "base_dim": 3, "fiber_dim": 2, "cusps": ["A", "Ap"], "label": "N"}
            ],
            "gluings": [
                {"from": ["V2", "Ap"], "to": ["V1", "Ap"],
                 "matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,1,1]]},
                {"from": ["V1", "A"], "to": ["V2", "A"],
                 "matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}
            ]
        }"#,
        )
        .unwrap()
        .classify_properties()
        .unwrap();
        assert_eq!(report, permuted);
    }
}
