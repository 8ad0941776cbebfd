//! Keldysh parameter, ponderomotive energy and `(I, omega)` regime scans.
//!
//! All inputs are in atomic units. The scan only tabulates; it deliberately
//! attaches no regime labels. Cells with (nearly) equal `gamma` are grouped
//! so that very different intensities and frequencies sharing one `gamma`
//! can be read off side by side.

use alloc::vec::Vec;

use crate::error::{GaugeError, Result};

/// Relative width of an iso-gamma group.
pub const ISO_GAMMA_TOLERANCE: f64 = 0.01;

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(GaugeError::invalid(name, "must be positive and finite"))
    }
}

/// `U_p = I / (2 omega)^2`.
pub fn ponderomotive(intensity: f64, omega: f64) -> Result<f64> {
    let (i, w) = (positive("I", intensity)?, positive("omega", omega)?);
    Ok(i / (4.0 * w * w))
}

/// `gamma = sqrt(E_B / (2 U_p))`.
pub fn keldysh_gamma(binding_energy: f64, u_p: f64) -> Result<f64> {
    let (eb, up) = (positive("E_B", binding_energy)?, positive("U_p", u_p)?);
    Ok(libm::sqrt(eb / (2.0 * up)))
}

/// `gamma = (omega / sqrt(I)) sqrt(2 E_B)`.
pub fn gamma_from_intensity(binding_energy: f64, omega: f64, intensity: f64) -> Result<f64> {
    let eb = positive("E_B", binding_energy)?;
    let w = positive("omega", omega)?;
    let i = positive("I", intensity)?;
    Ok(w / libm::sqrt(i) * libm::sqrt(2.0 * eb))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeldyshPoint {
    pub binding_energy: f64,
    pub omega: f64,
    pub intensity: f64,
    pub u_p: f64,
    pub gamma: f64,
}

impl KeldyshPoint {
    pub fn new(binding_energy: f64, omega: f64, intensity: f64) -> Result<Self> {
        let u_p = ponderomotive(intensity, omega)?;
        Ok(KeldyshPoint {
            binding_energy,
            omega,
            intensity,
            u_p,
            gamma: keldysh_gamma(binding_energy, u_p)?,
        })
    }
}

/// `count` geometrically spaced values from `start` to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GeometricGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        let g = GeometricGrid { start, stop, count };
        g.values()?;
        Ok(g)
    }

    pub fn single(value: f64) -> Self {
        GeometricGrid {
            start: value,
            stop: value,
            count: 1,
        }
    }

    /// Values in ascending order.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(GaugeError::EmptySamples("regime_scan grid"));
        }
        let (a, b) = (positive("grid.start", self.start)?, positive("grid.stop", self.stop)?);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if self.count == 1 {
            return Ok(alloc::vec![lo]);
        }
        let ratio = libm::log(hi / lo);
        let n = (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|k| match k {
                0 => lo,
                k if k + 1 == self.count => hi,
                k => lo * libm::exp(ratio * k as f64 / n),
            })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanCell {
    pub point: KeldyshPoint,
    /// Cells sharing an id have `gamma` within [`ISO_GAMMA_TOLERANCE`] of the
    /// group's smallest member. Ids increase with `gamma`.
    pub iso_group: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeScan {
    pub binding_energy: f64,
    pub intensity_grid: GeometricGrid,
    pub omega_grid: GeometricGrid,
    /// Ordered by `omega`, then by `I`, both ascending.
    pub cells: Vec<ScanCell>,
}

/// A pair of cells with (nearly) the same `gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsoGammaPair {
    pub low: KeldyshPoint,
    pub high: KeldyshPoint,
    pub intensity_ratio: f64,
}

impl RegimeScan {
    pub fn group_count(&self) -> usize {
        self.cells.iter().map(|c| c.iso_group + 1).max().unwrap_or(0)
    }

    /// For each iso-gamma group with at least two cells, the pair with the
    /// largest intensity ratio, if that ratio is at least `min_ratio`.
    pub fn iso_gamma_pairs(&self, min_ratio: f64) -> Vec<IsoGammaPair> {
        let mut out = Vec::new();
        for g in 0..self.group_count() {
            let members = self.cells.iter().filter(|c| c.iso_group == g).map(|c| c.point);
            let (mut low, mut high): (Option<KeldyshPoint>, Option<KeldyshPoint>) = (None, None);
            for m in members {
                if low.is_none_or(|l| m.intensity < l.intensity) {
                    low = Some(m);
                }
                if high.is_none_or(|h| m.intensity > h.intensity) {
                    high = Some(m);
                }
            }
            if let (Some(low), Some(high)) = (low, high) {
                let intensity_ratio = high.intensity / low.intensity;
                if intensity_ratio > 1.0 && intensity_ratio >= min_ratio {
                    out.push(IsoGammaPair {
                        low,
                        high,
                        intensity_ratio,
                    });
                }
            }
        }
        out
    }
}

/// Full Cartesian scan of `gamma` and `U_p` over the two grids.
pub fn regime_scan(binding_energy: f64, intensity: &GeometricGrid, omega: &GeometricGrid) -> Result<RegimeScan> {
    positive("E_B", binding_energy)?;
    let (is, ws) = (intensity.values()?, omega.values()?);
    let mut points = Vec::with_capacity(is.len() * ws.len());
    for &w in &ws {
        for &i in &is {
            points.push(KeldyshPoint::new(binding_energy, w, i)?);
        }
    }

    // Group by sweeping the cells in order of increasing gamma.
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].gamma.total_cmp(&points[b].gamma).then(a.cmp(&b)));
    let mut groups = alloc::vec![0usize; points.len()];
    let mut group = 0;
    let mut anchor = points[order[0]].gamma;
    for &idx in &order {
        let g = points[idx].gamma;
        if g > anchor * (1.0 + ISO_GAMMA_TOLERANCE) {
            group += 1;
            anchor = g;
        }
        groups[idx] = group;
    }

    Ok(RegimeScan {
        binding_energy,
        intensity_grid: *intensity,
        omega_grid: *omega,
        cells: points
            .into_iter()
            .zip(groups)
            .map(|(point, iso_group)| ScanCell { point, iso_group })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ponderomotive_examples() {
        assert_eq!(ponderomotive(4.0, 1.0).unwrap(), 1.0);
        assert_eq!(ponderomotive(1.0, 0.5).unwrap(), 1.0);
        let a = ponderomotive(0.37, 0.11).unwrap();
        assert!((ponderomotive(0.74, 0.11).unwrap() - 2.0 * a).abs() < 1e-15 * a);
        assert!(ponderomotive(0.0, 1.0).is_err());
        assert!(ponderomotive(1.0, -1.0).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(keldysh_gamma(1.0, 0.5).unwrap(), 1.0);
        assert_eq!(keldysh_gamma(2.0, 1.0).unwrap(), 1.0);
        assert!(keldysh_gamma(-1.0, 1.0).is_err());
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let g = keldysh_gamma(0.5, libm::pow(2.0, k as f64)).unwrap();
            assert!(g < prev);
            prev = g;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn gamma_from_intensity_example() {
        // 0.057 / sqrt(0.0285) * sqrt(1.0) = 0.337639...
        let g = gamma_from_intensity(0.5, 0.057, 0.0285).unwrap();
        assert!((g - 0.3376).abs() < 5e-5, "{g}");
        let via_up = keldysh_gamma(0.5, ponderomotive(0.0285, 0.057).unwrap()).unwrap();
        assert!((g - via_up).abs() < 1e-12);
        assert!(gamma_from_intensity(0.5, 0.057, 0.0).is_err());
    }

    #[test]
    fn grid_values() {
        let g = GeometricGrid::new(1.0, 100.0, 3).unwrap();
        let v = g.values().unwrap();
        assert_eq!((v[0], v[2]), (1.0, 100.0));
        assert!((v[1] - 10.0).abs() < 1e-13);
        assert_eq!(GeometricGrid::single(0.3).values().unwrap(), alloc::vec![0.3]);
        assert!(GeometricGrid::new(1.0, 2.0, 0).is_err());
        assert!(GeometricGrid::new(-1.0, 2.0, 3).is_err());
    }

    #[test]
    fn single_cell_scan() {
        let scan = regime_scan(0.5, &GeometricGrid::single(0.0285), &GeometricGrid::single(0.057)).unwrap();
        assert_eq!(scan.cells.len(), 1);
        assert_eq!(
            scan.cells[0].point.gamma,
            gamma_from_intensity(0.5, 0.057, 0.0285).unwrap()
        );
        assert_eq!(scan.cells[0].iso_group, 0);
    }

    #[test]
    fn scan_structure() {
        let is = GeometricGrid::new(1e-4, 1e-1, 7).unwrap();
        let ws = GeometricGrid::new(0.01, 0.1, 5).unwrap();
        let scan = regime_scan(0.5, &is, &ws).unwrap();
        assert_eq!(scan.cells.len(), 35);
        // ascending omega then I
        for w in scan.cells.windows(2) {
            let (a, b) = (w[0].point, w[1].point);
            assert!(a.omega < b.omega || (a.omega == b.omega && a.intensity < b.intensity));
        }
        // gamma linear in omega at fixed I
        let at = |wi: usize, ii: usize| scan.cells[wi * 7 + ii].point;
        for ii in 0..7 {
            let r = at(4, ii).gamma / at(0, ii).gamma;
            assert!((r - at(4, ii).omega / at(0, ii).omega).abs() < 1e-12);
        }
        // halving gamma needs 4x intensity (I grid step is 10^0.5)
        let quarter = at(2, 0).gamma / at(2, 4).gamma; // intensity ratio 100
        assert!((quarter - 10.0).abs() < 1e-9);
    }

    #[test]
    fn empty_grid_rejected() {
        let bad = GeometricGrid {
            start: 1.0,
            stop: 2.0,
            count: 0,
        };
        assert!(matches!(
            regime_scan(0.5, &bad, &GeometricGrid::single(0.1)),
            Err(GaugeError::EmptySamples(_))
        ));
    }
}
