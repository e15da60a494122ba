use std::sync::Arc;

use num_bigint::BigInt;

use crate::abelian::{GroupElem, GroupHom};
use crate::arith::Tower;
use crate::error::{Error, Result};
use crate::ramification::{match_galois, relative_herbrand, transfer_tower, ClosePairCertificate, GaloisGroup, HerbrandData, Q};
use crate::tori::TorusPointsQuotient;
use crate::tori::TorusSpec;
use crate::units::{DeligneIso, UnitElem};

/// A splitting field L/F carried across a certificate on F.
#[derive(Clone, Debug)]
pub struct SplitTransfer {
    pub cert: ClosePairCertificate,
    pub left_galois: Arc<GaloisGroup>,
    pub right_split: Arc<Tower>,
    pub right_galois: Arc<GaloisGroup>,
    /// certificate on L at level psi(l)
    pub split_cert: ClosePairCertificate,
    pub herbrand: HerbrandData,
    /// index in Gal(L/F) -> index in Gal(L'/F')
    pub perm: Vec<usize>,
}

impl SplitTransfer {
    pub fn new(cert: &ClosePairCertificate, galois: &Arc<GaloisGroup>) -> Result<Self> {
        let splitting = &galois.top;
        let k = cert.left.levels();
        if splitting.level_of(&cert.left) != Some(k) || galois.base_level != k {
            return Err(Error::InvalidParameter(format!("{} is not a Galois extension of {}", splitting.name, cert.left.name)));
        }
        if splitting.levels() == k {
            let right_galois = Arc::new(GaloisGroup::compute(&cert.right, cert.right.levels())?);
            let mut split_cert = cert.clone();
            split_cert.left = splitting.clone();
            return Ok(SplitTransfer {
                cert: cert.clone(),
                left_galois: galois.clone(),
                right_split: cert.right.clone(),
                right_galois,
                split_cert,
                herbrand: HerbrandData::identity(),
                perm: vec![0],
            });
        }
        let herbrand = relative_herbrand(splitting, k)?;
        let l1 = herbrand.l_one(cert.level)?;
        let chain = transfer_tower(cert, splitting, &[])?;
        let last = chain.last().expect("at least one step");
        if last.cert.level != l1 {
            return Err(Error::TransferFailed(format!("transferred level {} differs from psi(l) = {l1}", last.cert.level)));
        }
        let right_split = last.right.clone();
        let right_galois = Arc::new(GaloisGroup::compute(&right_split, cert.right.levels())?);
        let perm = match_galois(&last.cert, galois, &right_galois)?;
        Ok(SplitTransfer { cert: cert.clone(), left_galois: galois.clone(), right_split, right_galois, split_cert: last.cert.clone(), herbrand, perm })
    }

    pub fn reversed(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &j) in self.perm.iter().enumerate() {
            inv[j] = i;
        }
        SplitTransfer {
            cert: self.cert.inverse(),
            left_galois: self.right_galois.clone(),
            right_split: self.left_galois.top.clone(),
            right_galois: self.left_galois.clone(),
            split_cert: self.split_cert.inverse(),
            herbrand: self.herbrand.clone(),
            perm: inv,
        }
    }

    pub fn level(&self) -> usize {
        self.cert.level
    }

    /// r << l for this splitting field.
    pub fn check_level(&self, r: Q) -> Result<()> {
        if r > Q::from_integer(0) && self.herbrand.lleq(r, self.level()) {
            Ok(())
        } else {
            Err(Error::LevelCondition(format!(
                "r = {r} is not << l = {} for a splitting field with psi(l)/e = {}",
                self.level(),
                self.herbrand.psi.eval(Q::from_integer(self.level() as i64)) / Q::from_integer(self.herbrand.e as i64)
            )))
        }
    }
}

/// (F, T) and (F', T') with T' the transport of T along a transferred splitting field.
#[derive(Clone, Debug)]
pub struct ClosePairDatum {
    pub transfer: Arc<SplitTransfer>,
    pub left: TorusSpec,
    pub right: TorusSpec,
}

impl ClosePairDatum {
    pub fn new(cert: &ClosePairCertificate, spec: &TorusSpec) -> Result<Self> {
        let tr = Arc::new(SplitTransfer::new(cert, &spec.galois)?);
        Self::with_transfer(&tr, spec)
    }

    /// Reuses a transferred splitting field, so several tori share the same L'.
    pub fn with_transfer(tr: &Arc<SplitTransfer>, spec: &TorusSpec) -> Result<Self> {
        if !Arc::ptr_eq(&spec.galois, &tr.left_galois) && (spec.galois.top.levels() != tr.left_galois.top.levels() || spec.galois.autos != tr.left_galois.autos) {
            return Err(Error::InvalidParameter(format!("{} is not split by {}", spec.name, tr.left_galois.top.name)));
        }
        let right = spec.transport(&format!("{}'", spec.name), &tr.cert.right, &tr.right_split, tr.right_galois.clone(), &tr.perm)?;
        Ok(ClosePairDatum { transfer: tr.clone(), left: spec.clone(), right })
    }

    pub fn reversed(&self) -> Self {
        ClosePairDatum { transfer: Arc::new(self.transfer.reversed()), left: self.right.clone(), right: self.left.clone() }
    }

    pub fn level(&self) -> usize {
        self.transfer.level()
    }

    pub fn check_level(&self, r: Q) -> Result<()> {
        self.transfer.check_level(r)
    }

    pub fn pair(&self, r: Q) -> Result<LevelPair> {
        LevelPair::new(self, r)
    }

    /// Whether chi(t) and chi(t') match under the Deligne isomorphism for every basis character.
    pub fn is_standard_correspondent(&self, r: Q, t: &[UnitElem], t2: &[UnitElem]) -> Result<bool> {
        Ok(self.pair(r)?.is_standard_correspondent(t, t2))
    }
}

/// Point quotients of both sides at level r together with the split-level Deligne isomorphism.
#[derive(Clone, Debug)]
pub struct LevelPair {
    pub datum: ClosePairDatum,
    pub r: Q,
    pub left: Arc<TorusPointsQuotient>,
    pub right: Arc<TorusPointsQuotient>,
    pub deligne: DeligneIso,
    /// A -> A', component-wise Deligne isomorphism
    pub split_map: GroupHom,
}

impl LevelPair {
    pub fn new(datum: &ClosePairDatum, r: Q) -> Result<Self> {
        datum.check_level(r)?;
        let left = Arc::new(TorusPointsQuotient::new(&datum.left, r)?);
        let right = Arc::new(TorusPointsQuotient::new(&datum.right, r)?);
        let deligne = DeligneIso::new(&datum.transfer.split_cert, &left.split.units, &right.split.units)?;
        let split_map = left.split.componentwise(&right.split, &deligne.hom)?;
        Ok(LevelPair { datum: datum.clone(), r, left, right, deligne, split_map })
    }

    /// The correspondent of a tuple, computed on field classes.
    pub fn correspondent_tuple(&self, t: &[UnitElem]) -> Vec<UnitElem> {
        let (lu, ru) = (&self.left.split.units, &self.right.split.units);
        t.iter().map(|u| self.deligne.map(lu, ru, u)).collect()
    }

    pub fn is_standard_correspondent(&self, t: &[UnitElem], t2: &[UnitElem]) -> bool {
        self.correspondent_tuple(t) == t2
    }

    pub fn correspond(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        self.is_standard_correspondent(&self.left.tuple(x), &self.right.tuple(y))
    }

    pub fn format_left(&self, x: &[BigInt]) -> String {
        self.left.format(x)
    }

    pub fn format_right(&self, y: &[BigInt]) -> String {
        self.right.format(y)
    }

    pub(crate) fn image_in_right(&self, x: &[BigInt]) -> Option<GroupElem> {
        self.right.inclusion.preimage(&self.split_map.apply(&self.left.to_ambient(x)))
    }
}
