use std::fmt;
use std::sync::Arc;

use crate::abelian::IntMatrix;
use crate::arith::{StepKind, Tower};
use crate::error::{Error, Result};
use crate::ramification::{relative_herbrand, GaloisGroup, HerbrandData, TowerMap};

use super::lattice::GaloisLattice;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Catalog {
    /// G_m^n, possibly presented with a larger splitting field.
    Split,
    /// Res_{L/F} G_m^rank.
    WeilRestriction { rank: usize },
    /// Kernel of the norm Res_{L/F} G_m -> G_m for L/F cyclic, `sigma` a generator.
    NormOne { sigma: usize },
    /// Only the lattice is known; point groups are upper bounds.
    General,
}

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Catalog::Split => write!(f, "split"),
            Catalog::WeilRestriction { rank } => write!(f, "weil_restriction(rank {rank})"),
            Catalog::NormOne { .. } => write!(f, "norm_one"),
            Catalog::General => write!(f, "general"),
        }
    }
}

/// A torus over F split by L, through its character lattice with the action of Gal(L/F).
#[derive(Clone, Debug)]
pub struct TorusSpec {
    pub name: String,
    pub field: Arc<Tower>,
    pub splitting: Arc<Tower>,
    pub galois: Arc<GaloisGroup>,
    pub lattice: GaloisLattice,
    pub catalog: Catalog,
}

fn galois_over(field: &Arc<Tower>, splitting: &Arc<Tower>) -> Result<Arc<GaloisGroup>> {
    let k = splitting
        .level_of(field)
        .ok_or_else(|| Error::InvalidParameter(format!("{} is not a subfield of {}", field.name, splitting.name)))?;
    Ok(Arc::new(GaloisGroup::compute(splitting, k)?))
}

impl TorusSpec {
    pub fn split(name: &str, field: &Arc<Tower>, rank: usize) -> Result<Self> {
        Self::split_over(name, field, field, rank)
    }

    /// G_m^rank presented with the splitting field `splitting`, acting trivially.
    pub fn split_over(name: &str, field: &Arc<Tower>, splitting: &Arc<Tower>, rank: usize) -> Result<Self> {
        let galois = galois_over(field, splitting)?;
        let lattice = GaloisLattice::trivial(galois.group.clone(), rank);
        Ok(TorusSpec { name: name.into(), field: field.clone(), splitting: splitting.clone(), galois, lattice, catalog: Catalog::Split })
    }

    /// Res_{E/F} G_m^rank, with basis e_(tau, j) at position tau * rank + j.
    pub fn weil_restriction(name: &str, field: &Arc<Tower>, ext: &Arc<Tower>, rank: usize) -> Result<Self> {
        let galois = galois_over(field, ext)?;
        let reg = GaloisLattice::regular(galois.group.clone());
        let lattice = if rank == 1 {
            reg
        } else {
            let blocks: Vec<IntMatrix> = (0..galois.order()).map(|s| kron_identity(reg.matrix(s), rank)).collect();
            GaloisLattice::new(galois.group.clone(), blocks)?
        };
        Ok(TorusSpec {
            name: name.into(),
            field: field.clone(),
            splitting: ext.clone(),
            galois,
            lattice,
            catalog: Catalog::WeilRestriction { rank },
        })
    }

    pub fn norm_one(name: &str, field: &Arc<Tower>, ext: &Arc<Tower>) -> Result<Self> {
        let galois = galois_over(field, ext)?;
        let d = galois.order();
        if d < 2 {
            return Err(Error::InvalidParameter("norm-one torus of a trivial extension".into()));
        }
        let sigma = galois
            .generators
            .iter()
            .map(|(_, s)| *s)
            .chain(0..d)
            .find(|&s| galois.group.element_order(s) == d)
            .ok_or_else(|| Error::Unsupported("norm-one tori need a cyclic extension".into()))?;
        let lattice = GaloisLattice::norm_one(galois.group.clone(), sigma)?;
        Ok(TorusSpec {
            name: name.into(),
            field: field.clone(),
            splitting: ext.clone(),
            galois,
            lattice,
            catalog: Catalog::NormOne { sigma },
        })
    }

    /// A torus given by matrices on generators of Gal(L/F), as (automorphism index, matrix).
    pub fn general(name: &str, field: &Arc<Tower>, splitting: &Arc<Tower>, rank: usize, gens: &[(usize, IntMatrix)]) -> Result<Self> {
        let galois = galois_over(field, splitting)?;
        let lattice = GaloisLattice::from_generators(galois.group.clone(), rank, gens)?;
        Ok(TorusSpec { name: name.into(), field: field.clone(), splitting: splitting.clone(), galois, lattice, catalog: Catalog::General })
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// e(L/F).
    pub fn e(&self) -> usize {
        self.splitting.e() / self.field.e()
    }

    pub fn base_level(&self) -> usize {
        self.galois.base_level
    }

    pub fn herbrand(&self) -> Result<HerbrandData> {
        relative_herbrand(&self.splitting, self.base_level())
    }

    pub fn is_exact(&self) -> bool {
        self.catalog != Catalog::General
    }

    /// A lattice basis permuted by wild inertia exists (searched among {-1,0,1}-vectors).
    pub fn is_weakly_induced(&self) -> bool {
        self.lattice.permuted_basis(&self.galois.wild_inertia()).is_some()
    }

    /// Order of Frobenius on the lattice, capped at 12.
    pub fn default_stage_degree(&self) -> usize {
        let m = self.lattice.matrix(self.galois.frobenius);
        let id = IntMatrix::identity(self.rank());
        let mut p = m.clone();
        let mut k = 1;
        while p != id && k < 12 {
            p = p.mul(m);
            k += 1;
        }
        k
    }

    /// The same torus over F' split by L', for Galois groups matched by `perm`.
    pub fn transport(&self, name: &str, field: &Arc<Tower>, splitting: &Arc<Tower>, galois: Arc<GaloisGroup>, perm: &[usize]) -> Result<Self> {
        let lattice = self.lattice.reindex(galois.group.clone(), perm)?;
        let catalog = match &self.catalog {
            Catalog::NormOne { sigma } => Catalog::NormOne { sigma: perm[*sigma] },
            c => c.clone(),
        };
        Ok(TorusSpec { name: name.into(), field: field.clone(), splitting: splitting.clone(), galois, lattice, catalog })
    }

    /// Res_{E/F} of this torus (defined over E = self.field), E a subfield of L with L/F Galois.
    pub fn weil_restrict(&self, name: &str, base: &Arc<Tower>) -> Result<TorusSpec> {
        let big = galois_over(base, &self.splitting)?;
        if self.field.level_of(base).is_none() {
            return Err(Error::InvalidParameter(format!("{} is not a subfield of {}", base.name, self.field.name)));
        }
        let sub = restriction_indices(&big, &self.galois)?;
        let (lattice, _) = GaloisLattice::induce(&big.group, &sub, &self.lattice)?;
        let catalog = match self.catalog {
            Catalog::Split if self.splitting.levels() == self.field.levels() => Catalog::WeilRestriction { rank: self.rank() },
            _ => Catalog::General,
        };
        Ok(TorusSpec { name: name.into(), field: base.clone(), splitting: self.splitting.clone(), galois: big, lattice, catalog })
    }

    pub fn describe(&self) -> String {
        format!(
            "torus {} over {} split by {} catalog={} rank={} |Gal|={} weakly_induced={}",
            self.name,
            self.field.name,
            self.splitting.name,
            self.catalog,
            self.rank(),
            self.galois.order(),
            self.is_weakly_induced()
        )
    }
}

/// For `small` = Gal(L/E) inside `big` = Gal(L/F) over the same tower: the big index of each small element.
pub fn restriction_indices(big: &GaloisGroup, small: &GaloisGroup) -> Result<Vec<usize>> {
    small
        .autos
        .iter()
        .map(|s| {
            big.autos
                .iter()
                .position(|b| b.images() == s.images())
                .ok_or_else(|| Error::Undetermined("automorphism not found in the larger group".into()))
        })
        .collect()
}

/// For L a prefix of L~: the restriction Gal(L~/F) -> Gal(L/F).
pub fn restriction_map(big: &GaloisGroup, small: &GaloisGroup) -> Result<Vec<usize>> {
    let top = &big.top;
    let k = small.top.levels();
    if top.level_of(&small.top) != Some(k) {
        return Err(Error::InvalidParameter("restriction needs a subtower".into()));
    }
    big.autos
        .iter()
        .map(|s| {
            small
                .autos
                .iter()
                .position(|t| (0..k).all(|j| top.embed_from(k, &t.images()[j]) == s.images()[j]))
                .ok_or_else(|| Error::Undetermined("automorphism does not restrict".into()))
        })
        .collect()
}

fn kron_identity(m: &IntMatrix, k: usize) -> IntMatrix {
    let n = m.rows();
    let mut out = IntMatrix::zeros(n * k, n * k);
    for i in 0..n {
        for j in 0..n {
            for a in 0..k {
                out.set(i * k + a, j * k + a, m.get(i, j).clone());
            }
        }
    }
    out
}

/// The lattices of T and Res_{E/F} T_E with the diagonal and norm maps between them (on characters):
/// `diagonal_dual`: X*(Res) -> X*(T) and `norm_dual`: X*(T) -> X*(Res).
#[derive(Clone, Debug)]
pub struct DiagonalAndNorm {
    pub restricted: GaloisLattice,
    pub diagonal_dual: IntMatrix,
    pub norm_dual: IntMatrix,
}

/// For a torus split by L and an intermediate E (given as the subgroup Gal(L/E) of Gal(L/F)).
pub fn diagonal_and_norm(lattice: &GaloisLattice, sub: &[usize]) -> Result<DiagonalAndNorm> {
    let group = lattice.group();
    let mut small_action = vec![];
    let mut table = vec![vec![0; sub.len()]; sub.len()];
    for (i, &a) in sub.iter().enumerate() {
        small_action.push(lattice.matrix(a).clone());
        for (j, &b) in sub.iter().enumerate() {
            table[i][j] = sub
                .iter()
                .position(|&c| c == group.mul(a, b))
                .ok_or_else(|| Error::InvalidParameter("not a subgroup".into()))?;
        }
    }
    let small_group = crate::abelian::FiniteGroup::new(table)?;
    let small = GaloisLattice::new(small_group, small_action)?;
    let (restricted, reps) = GaloisLattice::induce(group, sub, &small)?;
    let n = lattice.rank();
    let k = reps.len();
    // g_i (x) chi -> g_i chi, and chi -> sum_i g_i (x) g_i^{-1} chi
    let mut diag = IntMatrix::zeros(k * n, n);
    let mut norm = IntMatrix::zeros(n, k * n);
    for (i, &g) in reps.iter().enumerate() {
        let mg = lattice.matrix(g);
        let mginv = lattice.matrix(group.inv(g));
        for b in 0..n {
            for c in 0..n {
                diag.set(i * n + b, c, mg.get(b, c).clone());
                norm.set(b, i * n + c, mginv.get(b, c).clone());
            }
        }
    }
    if !restricted.is_equivariant(lattice, &diag) || !lattice.is_equivariant(&restricted, &norm) {
        return Err(Error::NotEquivariant("diagonal or norm map".into()));
    }
    Ok(DiagonalAndNorm { restricted, diagonal_dual: diag, norm_dual: norm })
}

/// Stage data simulating the maximal unramified extension: L~ over F~ = F with an unramified
/// extension of degree f* adjoined.
#[derive(Clone, Debug)]
pub struct Stage {
    pub degree: usize,
    pub tower: Arc<Tower>,
    pub galois: Arc<GaloisGroup>,
    /// Restriction Gal(L~/F) -> Gal(L/F).
    pub rho: Vec<usize>,
    /// Gal(L~/F~) inside Gal(L~/F).
    pub base: Vec<usize>,
    /// Whether L is a proper prefix of L~ (otherwise L~ = L).
    pub extended: bool,
}

impl Stage {
    pub fn build(spec: &TorusSpec, degree: usize, name: &str) -> Result<Stage> {
        let tower = if Self::needs_extension(spec, degree)? {
            spec.splitting.extend_unramified(name, "w", degree)?
        } else {
            spec.splitting.clone()
        };
        Self::with_tower(spec, degree, &tower)
    }

    fn needs_extension(spec: &TorusSpec, degree: usize) -> Result<bool> {
        if degree == 1 {
            return Ok(false);
        }
        let steps = &spec.splitting.steps()[spec.base_level()..];
        let unram_degree: usize = steps.iter().filter(|s| s.kind == StepKind::Unramified).map(|s| s.degree).product();
        if steps.iter().all(|s| s.kind == StepKind::Unramified) && unram_degree == degree && !steps.is_empty() {
            return Ok(false);
        }
        if steps.iter().all(|s| s.kind == StepKind::Eisenstein) {
            return Ok(true);
        }
        Err(Error::Unsupported(format!(
            "unramified stage of degree {degree} for a splitting field with residue degree {unram_degree}"
        )))
    }

    /// Uses a given L~ (L itself, or L followed by one unramified step of degree f*).
    pub fn with_tower(spec: &TorusSpec, degree: usize, tower: &Arc<Tower>) -> Result<Stage> {
        let extended = Self::needs_extension(spec, degree)?;
        if !extended {
            let all: Vec<usize> = (0..spec.galois.order()).collect();
            let base = if degree == 1 { all.clone() } else { vec![spec.galois.identity()] };
            return Ok(Stage { degree, tower: spec.splitting.clone(), galois: spec.galois.clone(), rho: all, base, extended });
        }
        let k = tower.levels();
        if tower.level_of(&spec.splitting) != Some(k - 1) || tower.steps()[k - 1].kind != StepKind::Unramified || tower.steps()[k - 1].degree != degree {
            return Err(Error::InvalidParameter("stage tower must add one unramified step of degree f*".into()));
        }
        let galois = Arc::new(GaloisGroup::compute(tower, spec.base_level())?);
        let rho = restriction_map(&galois, &spec.galois)?;
        let w = tower.generator(k - 1);
        let base = (0..galois.order()).filter(|&s| galois.autos[s].images()[k - 1] == w.coeffs()).collect();
        Ok(Stage { degree, tower: tower.clone(), galois, rho, base, extended })
    }

    /// The map L -> L~.
    pub fn embedding(&self, spec: &TorusSpec) -> Result<TowerMap> {
        TowerMap::inclusion(&spec.splitting, &self.tower)
    }
}
