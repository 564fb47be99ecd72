//! Weil indices as symbolic fourth roots of unity.
//!
//! Only blocks whose index is known in closed form are accepted; anything
//! else (notably rank-one self-dual quadratic spaces over Q₂) is an error
//! rather than a guess.

use crate::error::{Error, Result};
use crate::field_data::{LocalQuadExt, Splitting};
use crate::hermitian::GramMatrix;
use serde::{Deserialize, Serialize};
use std::fmt;

/// i^exponent
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FourthRoot(u8);

impl FourthRoot {
    pub const ONE: FourthRoot = FourthRoot(0);
    pub const I: FourthRoot = FourthRoot(1);
    pub const MINUS_ONE: FourthRoot = FourthRoot(2);

    pub fn new(exponent: i64) -> Self {
        FourthRoot(exponent.rem_euclid(4) as u8)
    }

    pub fn from_sign(s: i32) -> Self {
        if s < 0 {
            Self::MINUS_ONE
        } else {
            Self::ONE
        }
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn mul(self, o: Self) -> Self {
        FourthRoot::new(self.0 as i64 + o.0 as i64)
    }

    pub fn pow(self, e: i64) -> Self {
        FourthRoot::new(self.0 as i64 * e.rem_euclid(4))
    }

    pub fn conj(self) -> Self {
        FourthRoot::new(-(self.0 as i64))
    }

    pub fn inv(self) -> Self {
        self.conj()
    }

    /// (re, im) as integers in {−1, 0, 1}
    pub fn value(self) -> (i32, i32) {
        [(1, 0), (0, 1), (-1, 0), (0, -1)][self.0 as usize]
    }
}

impl fmt::Display for FourthRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["1", "i", "-1", "-i"][self.0 as usize])
    }
}

/// One orthogonal summand of a space whose Weil index is requested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    /// Hermitian space with Gram matrix [[0,1_d],[1_d,0]].
    HermitianHyperbolic { d: usize },
    /// Any Hermitian space over a split algebra F⁺ × F⁺.
    SplitAlgebra { rank: usize },
    /// Even-rank Hermitian space containing a self-dual lattice, extension
    /// unramified or residue characteristic odd.
    EvenSelfDual { ext: LocalQuadExt, rank: usize },
    /// Hermitian space with a self-dual lattice over an unramified extension.
    UnramifiedSelfDual { ext: LocalQuadExt, rank: usize, psi_unramified: bool },
    /// Quadratic space with pairing [[0,1_d],[1_d,0]].
    QuadraticHyperbolic { d: usize },
    /// Quadratic space over Q_p with a self-dual lattice.
    QuadraticSelfDual { p: u64, rank: usize, psi_unramified: bool },
    /// The Archimedean line C over R with ψ(x) = e^{2πix}.
    ArchimedeanLine,
    /// A pair of copies of the line F_v: contributes γ(F_v)² = η(−1).
    LineSquared { ext: LocalQuadExt },
    /// A block taken with the conjugate character ψ̄.
    Conjugate(Box<Block>),
}

impl Block {
    pub fn index(&self) -> Result<FourthRoot> {
        use Block::*;
        match self {
            HermitianHyperbolic { .. } | SplitAlgebra { .. } | QuadraticHyperbolic { .. } => Ok(FourthRoot::ONE),
            EvenSelfDual { ext, rank } => {
                if rank % 2 == 1 {
                    return Err(Error::WeilIndexUncovered(format!("odd rank {rank} self-dual block")));
                }
                if ext.is_ramified() && ext.p == 2 {
                    return Err(Error::WeilIndexUncovered("ramified dyadic block".into()));
                }
                Ok(FourthRoot::ONE)
            }
            UnramifiedSelfDual { ext, rank, psi_unramified } => {
                if ext.is_ramified() {
                    return Err(Error::WeilIndexUncovered("self-dual block over a ramified extension".into()));
                }
                if *psi_unramified || ext.splitting == Splitting::Split || rank % 2 == 0 {
                    Ok(FourthRoot::ONE)
                } else {
                    Err(Error::WeilIndexUncovered("odd rank with ramified character".into()))
                }
            }
            QuadraticSelfDual { p, rank, psi_unramified } => {
                if *rank == 0 {
                    Ok(FourthRoot::ONE)
                } else if *p == 2 {
                    Err(Error::WeilIndexUncovered(format!("rank {rank} self-dual quadratic space over Q_2")))
                } else if !psi_unramified {
                    Err(Error::WeilIndexUncovered("ramified additive character".into()))
                } else {
                    Ok(FourthRoot::ONE)
                }
            }
            ArchimedeanLine => Ok(FourthRoot::I),
            LineSquared { ext } => Ok(FourthRoot::from_sign(ext.eta_minus_one())),
            Conjugate(b) => Ok(b.index()?.conj()),
        }
    }

    fn conjugated(self) -> Block {
        match self {
            Block::Conjugate(b) => *b,
            b => Block::Conjugate(Box::new(b)),
        }
    }
}

/// An orthogonal sum of blocks.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpaceDescriptor {
    pub blocks: Vec<Block>,
}

impl SpaceDescriptor {
    pub fn new(blocks: Vec<Block>) -> Self {
        SpaceDescriptor { blocks }
    }

    pub fn single(b: Block) -> Self {
        SpaceDescriptor { blocks: vec![b] }
    }

    pub fn direct_sum(&self, o: &SpaceDescriptor) -> SpaceDescriptor {
        SpaceDescriptor { blocks: self.blocks.iter().chain(&o.blocks).cloned().collect() }
    }

    /// The same space with ψ replaced by ψ̄.
    pub fn conjugate(&self) -> SpaceDescriptor {
        SpaceDescriptor { blocks: self.blocks.iter().cloned().map(Block::conjugated).collect() }
    }

    /// Descriptor of the Hermitian space of a Gram matrix, when covered:
    /// self-dual over an unramified extension (ψ unramified) or of even rank.
    pub fn of_gram(s: &GramMatrix) -> Result<SpaceDescriptor> {
        let (ext, rank) = (s.ext, s.rank());
        if rank == 0 {
            return Ok(SpaceDescriptor::default());
        }
        if ext.splitting == Splitting::Split {
            return Ok(SpaceDescriptor::single(Block::SplitAlgebra { rank }));
        }
        if !s.is_self_dual() {
            return Err(Error::WeilIndexUncovered("space without a self-dual lattice".into()));
        }
        Ok(SpaceDescriptor::single(if ext.is_ramified() {
            Block::EvenSelfDual { ext, rank }
        } else {
            Block::UnramifiedSelfDual { ext, rank, psi_unramified: true }
        }))
    }
}

pub fn weil_index(d: &SpaceDescriptor) -> Result<FourthRoot> {
    d.blocks.iter().try_fold(FourthRoot::ONE, |acc, b| Ok(acc.mul(b.index()?)))
}

/// ε_v(s, η_v, ψ_v) = p^{−a·(s−1/2)}·γ_ψ(F_v), a = c(ψ) + different exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonFactor {
    pub p: u64,
    /// a in p^{−a(s−1/2)}
    pub exponent: i64,
    /// γ_ψ(F_v) when it is known; None stands for the symbolic slot
    pub gamma: Option<FourthRoot>,
    pub conjugate_psi: bool,
}

impl EpsilonFactor {
    pub fn is_constant_one(&self) -> bool {
        self.exponent == 0 && self.gamma == Some(FourthRoot::ONE)
    }

    /// ε(s, η, ψ̄): the γ slot is conjugated.
    pub fn conjugate(&self) -> EpsilonFactor {
        EpsilonFactor {
            gamma: self.gamma.map(FourthRoot::conj),
            conjugate_psi: !self.conjugate_psi,
            ..self.clone()
        }
    }

    /// ε(1/2)² = γ² = η(−1)
    pub fn central_square(&self, ext: &LocalQuadExt) -> FourthRoot {
        FourthRoot::from_sign(ext.eta_minus_one())
    }
}

pub fn epsilon_weil_relation(ext: &LocalQuadExt, c_psi: i64) -> EpsilonFactor {
    let exponent = c_psi + ext.different_exponent as i64;
    // unramified η and ψ: ε ≡ 1, so γ_ψ(F_v) = 1
    let gamma = (!ext.is_ramified() && c_psi == 0).then_some(FourthRoot::ONE);
    EpsilonFactor { p: ext.p, exponent, gamma, conjugate_psi: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covered_values() {
        let inert = LocalQuadExt::new(3, Splitting::Inert).unwrap();
        let ram3 = LocalQuadExt::new(3, Splitting::Ramified).unwrap();
        let ram5 = LocalQuadExt::new(5, Splitting::Ramified).unwrap();
        let sd = Block::UnramifiedSelfDual { ext: inert, rank: 1, psi_unramified: true };
        assert_eq!(sd.index().unwrap(), FourthRoot::ONE);
        assert_eq!(Block::ArchimedeanLine.index().unwrap(), FourthRoot::I);
        assert_eq!(Block::LineSquared { ext: ram3 }.index().unwrap(), FourthRoot::MINUS_ONE);
        assert_eq!(Block::LineSquared { ext: ram5 }.index().unwrap(), FourthRoot::ONE);
        let q2 = Block::QuadraticSelfDual { p: 2, rank: 1, psi_unramified: true };
        assert!(matches!(q2.index(), Err(Error::WeilIndexUncovered(_))));
        assert_eq!(Block::Conjugate(Box::new(Block::ArchimedeanLine)).index().unwrap(), FourthRoot::new(-1));
    }

    #[test]
    fn epsilon_relation() {
        let inert = LocalQuadExt::new(5, Splitting::Inert).unwrap();
        assert!(epsilon_weil_relation(&inert, 0).is_constant_one());
        let ram = LocalQuadExt::new(7, Splitting::Ramified).unwrap();
        let e = epsilon_weil_relation(&ram, 0);
        assert_eq!((e.exponent, e.gamma), (1, None));
        assert_eq!(e.central_square(&ram), FourthRoot::MINUS_ONE);
    }
}
