//! Finite sets of points with multiplicity, and the clustering that turns
//! numerical endpoints into them.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::Polynomial;

pub const DEFAULT_CLUSTER_RADIUS: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub point: Vec<Complex64>,
    pub multiplicity: usize,
}

/// Atoms are kept in lexicographic order, pairwise more than
/// `2 * cluster_radius` apart.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    atoms: Vec<Atom>,
    cluster_radius: f64,
}

/// Canonical serialized atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub coordinates: Vec<[f64; 2]>,
    pub multiplicity: usize,
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::Input(format!("cluster radius must be positive, got {radius}")))
    }
}

impl PointSet {
    pub fn empty(cluster_radius: f64) -> Self {
        Self {
            atoms: Vec::new(),
            cluster_radius,
        }
    }

    /// Builds a set from atoms that are already separated. Close atoms are an
    /// error here; use [`cluster_weighted`] to merge them instead.
    pub fn from_atoms(atoms: Vec<Atom>, cluster_radius: f64) -> Result<Self> {
        check_radius(cluster_radius)?;
        check_dims(atoms.iter().map(|a| a.point.len()))?;
        if let Some(a) = atoms.iter().find(|a| a.multiplicity == 0) {
            return Err(Error::Input(format!("atom {:?} has multiplicity 0", a.point)));
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                let d = linalg::distance(&atoms[i].point, &atoms[j].point);
                if d <= 2.0 * cluster_radius {
                    return Err(Error::Input(format!(
                        "atoms {i} and {j} are {d:.3e} apart, within twice the cluster radius"
                    )));
                }
            }
        }
        let mut set = Self { atoms, cluster_radius };
        set.sort();
        Ok(set)
    }

    fn sort(&mut self) {
        self.atoms.sort_by(|a, b| linalg::lex_cmp(&a.point, &b.point));
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn cluster_radius(&self) -> f64 {
        self.cluster_radius
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Ambient dimension, unknown for the empty set.
    pub fn dim(&self) -> Option<usize> {
        self.atoms.first().map(|a| a.point.len())
    }

    /// Total mass.
    pub fn cardinality(&self) -> usize {
        self.atoms.iter().map(|a| a.multiplicity).sum()
    }

    /// Multiplicity of the atom within `tol` of `x`, or 0.
    pub fn multiplicity_at(&self, x: &[Complex64], tol: f64) -> usize {
        self.atoms
            .iter()
            .filter(|a| a.point.len() == x.len() && linalg::distance(&a.point, x) <= tol)
            .map(|a| a.multiplicity)
            .sum()
    }

    /// Smallest distance between two atoms; `None` with fewer than two.
    pub fn min_separation(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.atoms.len() {
            for j in i + 1..self.atoms.len() {
                let d = linalg::distance(&self.atoms[i].point, &self.atoms[j].point);
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }

    /// `k * M`. Zero gives the empty set.
    pub fn scaled(&self, k: usize) -> Self {
        if k == 0 {
            return Self::empty(self.cluster_radius);
        }
        let mut out = self.clone();
        for a in &mut out.atoms {
            a.multiplicity *= k;
        }
        out
    }

    /// `M + N`, merging atoms that come within twice the radius.
    pub fn sum(&self, other: &PointSet) -> Result<Self> {
        let mut weighted: Vec<(Vec<Complex64>, usize)> = self.weighted();
        weighted.extend(other.weighted());
        Ok(cluster_weighted(&weighted, self.cluster_radius.max(other.cluster_radius), |_| None)?.set)
    }

    fn weighted(&self) -> Vec<(Vec<Complex64>, usize)> {
        self.atoms.iter().map(|a| (a.point.clone(), a.multiplicity)).collect()
    }

    /// Every atom repeated by its multiplicity.
    pub fn expanded(&self) -> Vec<Vec<Complex64>> {
        self.atoms
            .iter()
            .flat_map(|a| std::iter::repeat_n(a.point.clone(), a.multiplicity))
            .collect()
    }

    pub fn to_records(&self) -> Vec<AtomRecord> {
        self.atoms
            .iter()
            .map(|a| AtomRecord {
                coordinates: a.point.iter().map(|c| [c.re, c.im]).collect(),
                multiplicity: a.multiplicity,
            })
            .collect()
    }

    pub fn from_records(records: &[AtomRecord], cluster_radius: f64) -> Result<Self> {
        let atoms = records
            .iter()
            .map(|r| Atom {
                point: r.coordinates.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
                multiplicity: r.multiplicity,
            })
            .collect();
        Self::from_atoms(atoms, cluster_radius)
    }
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_records().serialize(serializer)
    }
}

fn check_dims(mut dims: impl Iterator<Item = usize>) -> Result<()> {
    if let Some(first) = dims.next() {
        if let Some(bad) = dims.find(|&d| d != first) {
            return Err(Error::Dimension {
                expected: first,
                found: bad,
            });
        }
    }
    Ok(())
}

/// Two clusterings that disagree: at `radius` some clusters merge that stay
/// apart at `radius / 10`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainAmbiguity {
    pub coarse: PointSet,
    pub fine: PointSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub set: PointSet,
    pub ambiguity: Option<ChainAmbiguity>,
}

/// Single-linkage clustering of unit-mass points.
pub fn cluster(points: &[Vec<Complex64>], radius: f64) -> Result<Clustering> {
    cluster_refined(points, radius, |_| None)
}

/// Like [`cluster`], with `refine` given each centroid; a `Some` result
/// within `radius` of the centroid replaces it as representative.
pub fn cluster_refined(
    points: &[Vec<Complex64>],
    radius: f64,
    refine: impl Fn(&[Complex64]) -> Option<Vec<Complex64>>,
) -> Result<Clustering> {
    let weighted: Vec<(Vec<Complex64>, usize)> = points.iter().map(|p| (p.clone(), 1)).collect();
    cluster_weighted(&weighted, radius, refine)
}

/// Groups of indices whose points chain together through links of length at
/// most `2 * radius`, then merged until group centroids are more than
/// `2 * radius` apart.
fn partition(points: &[(Vec<Complex64>, usize)], radius: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if linalg::distance(&points[i].0, &points[j].0) <= 2.0 * radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    loop {
        let centroids: Vec<Vec<Complex64>> = groups.iter().map(|g| centroid(points, g)).collect();
        let close = (0..groups.len())
            .flat_map(|i| (i + 1..groups.len()).map(move |j| (i, j)))
            .find(|&(i, j)| linalg::distance(&centroids[i], &centroids[j]) <= 2.0 * radius);
        match close {
            Some((i, j)) => {
                let moved = groups.remove(j);
                groups[i].extend(moved);
            }
            None => return groups,
        }
    }
}

fn centroid(points: &[(Vec<Complex64>, usize)], group: &[usize]) -> Vec<Complex64> {
    let dim = points[group[0]].0.len();
    let mut sum = vec![Complex64::default(); dim];
    let mut mass = 0usize;
    for &i in group {
        let (p, m) = &points[i];
        for (s, x) in sum.iter_mut().zip(p) {
            *s += x * *m as f64;
        }
        mass += m;
    }
    sum.iter().map(|s| s / mass as f64).collect()
}

fn build(
    points: &[(Vec<Complex64>, usize)],
    groups: &[Vec<usize>],
    radius: f64,
    refine: &dyn Fn(&[Complex64]) -> Option<Vec<Complex64>>,
) -> PointSet {
    let mut atoms: Vec<Atom> = groups
        .iter()
        .map(|g| {
            let c = centroid(points, g);
            let point = match refine(&c) {
                Some(r) if r.len() == c.len() && linalg::distance(&r, &c) <= radius => r,
                _ => c,
            };
            Atom {
                point,
                multiplicity: g.iter().map(|&i| points[i].1).sum(),
            }
        })
        .collect();
    atoms.sort_by(|a, b| linalg::lex_cmp(&a.point, &b.point));
    PointSet {
        atoms,
        cluster_radius: radius,
    }
}

/// Clustering of points with positive integer weights. Weights add up inside
/// a cluster.
pub fn cluster_weighted(
    points: &[(Vec<Complex64>, usize)],
    radius: f64,
    refine: impl Fn(&[Complex64]) -> Option<Vec<Complex64>>,
) -> Result<Clustering> {
    check_radius(radius)?;
    check_dims(points.iter().map(|p| p.0.len()))?;
    let points: Vec<(Vec<Complex64>, usize)> = points.iter().filter(|p| p.1 > 0).cloned().collect();
    let coarse = partition(&points, radius);
    let set = build(&points, &coarse, radius, &refine);
    let fine = partition(&points, radius / 10.0);
    let ambiguity = (fine.len() != coarse.len()).then(|| ChainAmbiguity {
        coarse: set.clone(),
        fine: build(&points, &fine, radius / 10.0, &refine),
    });
    Ok(Clustering { set, ambiguity })
}

/// Maximum bipartite matching by augmenting paths. `adj[b]` lists the
/// `a`-indices `b` may pair with. Returns the size of the matching.
fn max_matching(adj: &[Vec<usize>], n_a: usize) -> usize {
    fn augment(b: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &a in &adj[b] {
            if seen[a] {
                continue;
            }
            seen[a] = true;
            if owner[a].is_none_or(|other| augment(other, adj, seen, owner)) {
                owner[a] = Some(b);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; n_a];
    let mut size = 0;
    for b in 0..adj.len() {
        let mut seen = vec![false; n_a];
        if augment(b, adj, &mut seen, &mut owner) {
            size += 1;
        }
    }
    size
}

/// Both sets with atoms closer than `tol` merged, so that comparisons at
/// `tol` do not depend on how finely each side was clustered.
fn normalized(a: &PointSet, b: &PointSet, tol: f64) -> Result<(PointSet, PointSet)> {
    check_radius(tol)?;
    if let (Some(da), Some(db)) = (a.dim(), b.dim()) {
        if da != db {
            return Err(Error::Dimension {
                expected: da,
                found: db,
            });
        }
    }
    let merge = |s: &PointSet| -> Result<PointSet> { Ok(cluster_weighted(&s.weighted(), tol / 2.0, |_| None)?.set) };
    Ok((merge(a)?, merge(b)?))
}

fn matches(big: &PointSet, small: &PointSet, tol: f64, accept: impl Fn(usize, usize) -> bool) -> bool {
    let adj: Vec<Vec<usize>> = small
        .atoms
        .iter()
        .map(|s| {
            (0..big.atoms.len())
                .filter(|&i| {
                    let b = &big.atoms[i];
                    linalg::distance(&b.point, &s.point) <= tol && accept(b.multiplicity, s.multiplicity)
                })
                .collect()
        })
        .collect();
    max_matching(&adj, big.atoms.len()) == small.atoms.len()
}

/// `A >= B`: every atom of `B` pairs with its own atom of `A` within `tol`
/// carrying at least as much multiplicity.
pub fn multiset_geq(a: &PointSet, b: &PointSet, tol: f64) -> Result<bool> {
    let (a, b) = normalized(a, b, tol)?;
    Ok(matches(&a, &b, tol, |ma, mb| ma >= mb))
}

/// Equal supports within `tol` and equal multiplicities.
pub fn multiset_equal(a: &PointSet, b: &PointSet, tol: f64) -> Result<bool> {
    let (a, b) = normalized(a, b, tol)?;
    Ok(a.len() == b.len() && matches(&a, &b, tol, |ma, mb| ma == mb))
}

/// Image of `m` under the polynomial map `phi`, re-clustered at the radius
/// of `m`. Mass is preserved.
pub fn pushforward(phi: &[Polynomial], m: &PointSet) -> Result<PointSet> {
    let mut images = Vec::with_capacity(m.len());
    for a in &m.atoms {
        let y = phi.iter().map(|p| p.evaluate(&a.point)).collect::<Result<Vec<_>>>()?;
        images.push((y, a.multiplicity));
    }
    if images.is_empty() {
        return Ok(PointSet::empty(m.cluster_radius));
    }
    Ok(cluster_weighted(&images, m.cluster_radius, |_| None)?.set)
}

/// Order used for reports: lexicographic on atoms, then multiplicity.
pub fn atom_cmp(a: &Atom, b: &Atom) -> Ordering {
    linalg::lex_cmp(&a.point, &b.point).then(a.multiplicity.cmp(&b.multiplicity))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn set(atoms: &[(f64, usize)]) -> PointSet {
        PointSet::from_atoms(
            atoms
                .iter()
                .map(|&(x, m)| Atom {
                    point: vec![c(x, 0.0)],
                    multiplicity: m,
                })
                .collect(),
            DEFAULT_CLUSTER_RADIUS,
        )
        .unwrap()
    }

    #[test]
    fn clusters_hand_example() {
        let pts = vec![vec![c(1e-7, 0.0)], vec![c(-1e-7, 0.0)], vec![c(3.0000001, 0.0)]];
        let cl = cluster(&pts, 1e-5).unwrap();
        assert!(cl.ambiguity.is_none());
        assert_eq!(cl.set.len(), 2);
        assert_eq!(cl.set.atoms()[0].multiplicity, 2);
        assert!(cl.set.atoms()[0].point[0].norm() < 1e-12);
        assert_eq!(cl.set.atoms()[1].multiplicity, 1);
        assert_eq!(cl.set.cardinality(), 3);
        assert!(cluster(&[], 1e-5).unwrap().set.is_empty());
    }

    #[test]
    fn chains_are_flagged() {
        let pts = vec![vec![c(0.0, 0.0)], vec![c(1.5e-5, 0.0)], vec![c(3e-5, 0.0)]];
        let cl = cluster(&pts, 1e-5).unwrap();
        assert_eq!(cl.set.len(), 1);
        let amb = cl.ambiguity.unwrap();
        assert_eq!(amb.fine.len(), 3);
    }

    #[test]
    fn comparisons() {
        let a = set(&[(0.0, 2), (3.0, 1)]);
        assert!(multiset_geq(&a, &set(&[(0.0, 1)]), 1e-6).unwrap());
        assert!(!multiset_geq(&set(&[(0.0, 2)]), &set(&[(0.0, 3)]), 1e-6).unwrap());
        assert!(multiset_equal(&a, &a, 1e-6).unwrap());
        let split = PointSet::from_atoms(
            vec![
                Atom { point: vec![c(0.0, 0.0)], multiplicity: 1 },
                Atom { point: vec![c(0.0, 2e-6)], multiplicity: 1 },
            ],
            1e-7,
        )
        .unwrap();
        assert!(multiset_equal(&set(&[(0.0, 2)]), &split, 1e-5).unwrap());
    }

    #[test]
    fn constant_pushforward_adds_mass() {
        let m = set(&[(1.0, 2), (5.0, 3)]);
        let phi = vec![Polynomial::constant(1, c(7.0, 0.0))];
        let img = pushforward(&phi, &m).unwrap();
        assert_eq!(img.len(), 1);
        assert_eq!(img.atoms()[0].multiplicity, 5);
        assert!((img.atoms()[0].point[0] - 7.0).norm() < 1e-14);
    }

    #[test]
    fn from_atoms_rejects_close_atoms() {
        let atoms = vec![
            Atom { point: vec![c(0.0, 0.0)], multiplicity: 1 },
            Atom { point: vec![c(1e-6, 0.0)], multiplicity: 1 },
        ];
        assert!(PointSet::from_atoms(atoms, 1e-5).is_err());
    }
}
