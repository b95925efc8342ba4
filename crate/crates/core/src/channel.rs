//! Seeded channel realizations with path loss absorbed into every entry.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::geometry::{element_positions, Architecture, PathLoss, SystemLayout};
use crate::linalg::{complex_gaussian, CMatrix, CVector};

/// All complex channel gains of one realization.
///
/// `h_ti` and `h_ri` are stored as columns; their conjugate transposes are the
/// IRS-to-tag and IRS-to-reader rows that multiply `Θ` in the composite links.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// CE→tag, length L.
    pub h_ct: CVector,
    /// CE→IRS, N×L.
    pub h_ci: CMatrix,
    /// CE→reader, length L. Carried for completeness; the unmodulated carrier
    /// is removed before detection so the optimizer never reads it.
    pub h_cr: CVector,
    /// Tag↔IRS, length N.
    pub h_ti: CVector,
    /// Reader↔IRS, length N.
    pub h_ri: CVector,
    /// Tag→reader.
    pub h_tr: Complex64,
    pub architecture: Architecture,
}

impl ChannelSet {
    pub fn new(
        h_ct: CVector,
        h_ci: CMatrix,
        h_cr: CVector,
        h_ti: CVector,
        h_ri: CVector,
        h_tr: Complex64,
    ) -> Result<Self> {
        let set = Self {
            h_ct,
            h_ci,
            h_cr,
            h_ti,
            h_ri,
            h_tr,
            architecture: Architecture::Bistatic,
        };
        set.validate()?;
        Ok(set)
    }

    /// Monostatic set built from the three unique reciprocal links.
    ///
    /// The reader is also the single-antenna emitter, so `h_ct = h_tr` and the
    /// CE→IRS column carries the reader↔IRS magnitude with the phase chosen so
    /// that the downlink cascade R→I→T equals the uplink cascade T→I→R:
    /// `H1(Θ) = H2(Θ)` for every `Θ`.
    pub fn monostatic(h_tr: Complex64, h_ri: CVector, h_ti: CVector) -> Result<Self> {
        if h_ri.len() != h_ti.len() {
            return Err(Error::DimensionMismatch(format!(
                "h_ri has {} entries, h_ti has {}",
                h_ri.len(),
                h_ti.len()
            )));
        }
        let n = h_ri.len();
        let h_ci = CMatrix::from_fn(n, 1, |i, _| {
            let t = h_ti[i];
            if t.norm() > 0.0 {
                h_ri[i].conj() * t / t.conj()
            } else {
                h_ri[i].conj()
            }
        });
        let set = Self {
            h_ct: CVector::from_element(1, h_tr),
            h_ci,
            h_cr: CVector::zeros(1),
            h_ti,
            h_ri,
            h_tr,
            architecture: Architecture::Monostatic,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.h_ct.len();
        let n = self.h_ti.len();
        if l == 0 {
            return Err(Error::DimensionMismatch("h_ct must have at least one antenna".into()));
        }
        if self.h_ci.nrows() != n || self.h_ci.ncols() != l {
            return Err(Error::DimensionMismatch(format!(
                "h_ci is {}x{}, expected {n}x{l}",
                self.h_ci.nrows(),
                self.h_ci.ncols()
            )));
        }
        if self.h_ri.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "h_ri has {} entries, expected {n}",
                self.h_ri.len()
            )));
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !(self.h_ct.iter().all(finite)
            && self.h_ci.iter().all(finite)
            && self.h_cr.iter().all(finite)
            && self.h_ti.iter().all(finite)
            && self.h_ri.iter().all(finite)
            && finite(&self.h_tr))
        {
            return Err(domain("channel entries must be finite"));
        }
        Ok(())
    }

    /// Number of IRS elements N.
    pub fn elements(&self) -> usize {
        self.h_ti.len()
    }

    /// Number of CE antennas L.
    pub fn antennas(&self) -> usize {
        self.h_ct.len()
    }

    /// Copy with every IRS-related channel set to zero.
    pub fn without_irs(&self) -> Self {
        let mut out = self.clone();
        out.h_ci.fill(Complex64::new(0.0, 0.0));
        out.h_ti.fill(Complex64::new(0.0, 0.0));
        out.h_ri.fill(Complex64::new(0.0, 0.0));
        out
    }
}

/// Unit-scale synthetic instance: every entry i.i.d. `CN(0, 1)`.
///
/// Geometry-free; used for solver tests and benchmarks.
pub fn gaussian_channels(elements: usize, antennas: usize, seed: u64) -> ChannelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = || complex_gaussian(&mut rng);
    let h_ct = CVector::from_fn(antennas, |_, _| g());
    let h_ci = CMatrix::from_fn(elements, antennas, |_, _| g());
    let h_cr = CVector::from_fn(antennas, |_, _| g());
    let h_ti = CVector::from_fn(elements, |_, _| g());
    let h_ri = CVector::from_fn(elements, |_, _| g());
    let h_tr = g();
    ChannelSet {
        h_ct,
        h_ci,
        h_cr,
        h_ti,
        h_ri,
        h_tr,
        architecture: Architecture::Bistatic,
    }
}

fn draw<R: Rng>(rng: &mut R, amplitude: f64) -> Complex64 {
    Complex64::from_polar(amplitude, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Draws one channel realization: each entry is its path-loss amplitude times
/// a uniformly distributed phase. Deterministic for a fixed seed.
///
/// Draw order (bistatic): h_ct, h_ci (row-major), h_cr, h_ti, h_ri, h_tr.
/// Monostatic: h_tr, h_ri, h_ti.
pub fn synthesize_channels(layout: &SystemLayout, model: &dyn PathLoss, seed: u64) -> Result<ChannelSet> {
    layout.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let irs = &layout.irs;
    let elements = element_positions(irs);
    let area = irs.element_area();
    let lambda = layout.wavelength;
    let tag = layout.tag_position;
    let reader = layout.reader_position;

    let hop = |node: &crate::geometry::Position2D, idx: usize| -> Result<f64> {
        let e = &elements[idx];
        let d = e.distance(node);
        if d == 0.0 {
            return Err(domain(format!("node coincides with IRS element {idx}")));
        }
        model.irs_hop(d, irs.obliquity(e, node), area, lambda)
    };
    let direct = |a: &crate::geometry::Position2D, b: &crate::geometry::Position2D, what: &str| -> Result<f64> {
        let d = a.distance(b);
        if d == 0.0 {
            return Err(domain(format!("{what}: endpoints coincide")));
        }
        model.direct(d, lambda)
    };

    let n = elements.len();
    match layout.architecture {
        Architecture::Bistatic => {
            let l = layout.ce_antennas;
            let ce = layout.ce_position;
            let a_ct = direct(&ce, &tag, "CE-tag link")?;
            let a_cr = direct(&ce, &reader, "CE-reader link")?;
            let a_tr = direct(&tag, &reader, "tag-reader link")?;
            let a_ci = (0..n).map(|i| hop(&ce, i)).collect::<Result<Vec<_>>>()?;
            let a_ti = (0..n).map(|i| hop(&tag, i)).collect::<Result<Vec<_>>>()?;
            let a_ri = (0..n).map(|i| hop(&reader, i)).collect::<Result<Vec<_>>>()?;

            let h_ct = CVector::from_iterator(l, (0..l).map(|_| draw(&mut rng, a_ct)));
            let mut h_ci = CMatrix::zeros(n, l);
            for i in 0..n {
                for j in 0..l {
                    h_ci[(i, j)] = draw(&mut rng, a_ci[i]);
                }
            }
            let h_cr = CVector::from_iterator(l, (0..l).map(|_| draw(&mut rng, a_cr)));
            let h_ti = CVector::from_iterator(n, a_ti.iter().map(|&a| draw(&mut rng, a)));
            let h_ri = CVector::from_iterator(n, a_ri.iter().map(|&a| draw(&mut rng, a)));
            let h_tr = draw(&mut rng, a_tr);
            ChannelSet::new(h_ct, h_ci, h_cr, h_ti, h_ri, h_tr)
        }
        Architecture::Monostatic => {
            let a_tr = direct(&tag, &reader, "tag-reader link")?;
            let a_ri = (0..n).map(|i| hop(&reader, i)).collect::<Result<Vec<_>>>()?;
            let a_ti = (0..n).map(|i| hop(&tag, i)).collect::<Result<Vec<_>>>()?;
            let h_tr = draw(&mut rng, a_tr);
            let h_ri = CVector::from_iterator(n, a_ri.iter().map(|&a| draw(&mut rng, a)));
            let h_ti = CVector::from_iterator(n, a_ti.iter().map(|&a| draw(&mut rng, a)));
            ChannelSet::monostatic(h_tr, h_ri, h_ti)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{wavelength, IrsGeometry, Position2D, StandInPathLoss};

    fn bistatic(tag_x: f64) -> SystemLayout {
        let lambda = wavelength(915e6);
        SystemLayout {
            ce_position: Position2D::new(0.0, 0.0),
            reader_position: Position2D::new(100.0, 0.0),
            tag_position: Position2D::new(tag_x, 0.0),
            irs: IrsGeometry::new(Position2D::new(20.0, 20.0), [0.0, -1.0], 16, lambda).unwrap(),
            wavelength: lambda,
            ce_antennas: 4,
            architecture: Architecture::Bistatic,
        }
    }

    fn monostatic() -> SystemLayout {
        let lambda = wavelength(915e6);
        SystemLayout {
            ce_position: Position2D::new(0.0, 0.0),
            reader_position: Position2D::new(0.0, 0.0),
            tag_position: Position2D::new(15.0, 5.0),
            irs: IrsGeometry::new(Position2D::new(40.0, 0.0), [-1.0, 0.0], 9, lambda).unwrap(),
            wavelength: lambda,
            ce_antennas: 1,
            architecture: Architecture::Monostatic,
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let model = StandInPathLoss::default();
        let a = synthesize_channels(&bistatic(30.0), &model, 11).unwrap();
        let b = synthesize_channels(&bistatic(30.0), &model, 11).unwrap();
        assert_eq!(a, b);
        let c = synthesize_channels(&bistatic(30.0), &model, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn magnitudes_match_path_loss() {
        let layout = bistatic(30.0);
        let model = StandInPathLoss::default();
        let ch = synthesize_channels(&layout, &model, 1).unwrap();
        let rel = |got: f64, want: f64| (got - want).abs() <= 1e-12 * want;
        let a_tr = model.direct(70.0, layout.wavelength).unwrap();
        assert!(rel(ch.h_tr.norm(), a_tr));
        let a_ct = model.direct(30.0, layout.wavelength).unwrap();
        assert!(ch.h_ct.iter().all(|z| rel(z.norm(), a_ct)));
        let pts = element_positions(&layout.irs);
        for (i, e) in pts.iter().enumerate() {
            let tag = layout.tag_position;
            let want = model
                .irs_hop(e.distance(&tag), layout.irs.obliquity(e, &tag), layout.irs.element_area(), layout.wavelength)
                .unwrap();
            assert!(rel(ch.h_ti[i].norm(), want));
        }
    }

    #[test]
    fn coincident_nodes_are_rejected() {
        let mut layout = bistatic(30.0);
        layout.tag_position = layout.reader_position;
        assert!(synthesize_channels(&layout, &StandInPathLoss::default(), 0).is_err());
    }

    #[test]
    fn monostatic_set_is_reciprocal() {
        let ch = synthesize_channels(&monostatic(), &StandInPathLoss::default(), 4).unwrap();
        assert_eq!(ch.antennas(), 1);
        assert_eq!(ch.h_ct[0], ch.h_tr);
        for i in 0..ch.elements() {
            assert!((ch.h_ci[(i, 0)].norm() - ch.h_ri[i].norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let z = Complex64::new(1.0, 0.0);
        let err = ChannelSet::new(
            CVector::from_element(2, z),
            CMatrix::from_element(3, 1, z),
            CVector::from_element(2, z),
            CVector::from_element(3, z),
            CVector::from_element(3, z),
            z,
        );
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }
}
