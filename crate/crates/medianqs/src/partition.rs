//! Equal-area partition of the sphere into `k` congruent-area regions.
//!
//! The sphere is sliced into latitude bands: two polar caps of six regions
//! each and `n` interior bands, `n` the largest odd integer `<= sqrt(k/2)`.
//! Interior band boundaries start from equally spaced approximate latitudes,
//! whose ideal real-valued region counts are rounded by largest remainder to
//! total `k - 12`; exact latitudes are then recomputed from the cumulative
//! counts so every region has spherical area exactly `4*pi/k`.
//!
//! Regions are half-open rectangles `[theta_{i-1}, theta_i) x [l, r)` in
//! spherical coordinates, with the last band and sector closed, so `locate`
//! is a partition of the sphere in the set-theoretic sense.

use crate::sphere::UnitPoint;
use crate::{Error, Result, CAP_INRADIUS_COEFF, MIN_K, REGION_DIAMETER_COEFF};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Identifier of one region: band `0..=n+1` (0 = north cap), sector `1..=m_band`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegionId {
    pub band: u32,
    pub sector: u32,
}

/// An equal-area partition with `k` regions.
#[derive(Clone, Debug)]
pub struct EqualAreaPartition {
    k: u32,
    /// Number of interior bands (odd); total bands = `n + 2`.
    n: u32,
    /// Cap colatitude `arccos(1 - 12/k)`.
    theta0: f64,
    /// Band boundaries `0 = theta_{-1} < theta_0 < ... < theta_n < theta_{n+1} = pi`;
    /// `latitudes[i]` is the lower boundary of band `i`, length `n + 3`.
    latitudes: Vec<f64>,
    /// Cosines of `latitudes`, carried exactly from the cumulative counts.
    cos_latitudes: Vec<f64>,
    /// Equally spaced approximate interior latitudes `theta'_0..theta'_n`.
    approx_latitudes: Vec<f64>,
    /// Regions per band, `sector_counts[i]` for band `i`; caps are 6.
    sector_counts: Vec<u32>,
    /// Spacing of the approximate latitudes.
    delta: f64,
}

/// Builds the partition; `k` must be odd and at least 237.
pub fn build_partition(k: u32) -> Result<EqualAreaPartition> {
    if k % 2 == 0 {
        return Err(Error::Parameter(format!("k = {k} must be odd")));
    }
    if k < MIN_K {
        return Err(Error::Parameter(format!("k = {k} is below the minimum {MIN_K}")));
    }
    let kf = k as f64;
    let cos_theta0 = 1.0 - 12.0 / kf;
    let theta0 = cos_theta0.acos();
    let mut n = (kf / 2.0).sqrt().floor() as u32;
    if n % 2 == 0 {
        n -= 1;
    }
    let delta = (std::f64::consts::PI - 2.0 * theta0) / n as f64;

    let mut approx = Vec::with_capacity(n as usize + 1);
    for i in 0..=n {
        approx.push(theta0 + i as f64 * delta);
    }
    approx[n as usize] = std::f64::consts::PI - theta0;

    // Ideal real counts from the equal-area relation at the approximate
    // latitudes, rounded by largest remainder to sum exactly k - 12.
    let ideals: Vec<f64> = (1..=n as usize)
        .map(|i| kf / 2.0 * (approx[i - 1].cos() - approx[i].cos()))
        .collect();
    let mut counts: Vec<u32> = ideals.iter().map(|r| r.floor() as u32).collect();
    let assigned: u32 = counts.iter().sum();
    let target = k - 12;
    if assigned > target {
        return Err(Error::Invariant(format!(
            "band rounding overflow: floors sum to {assigned} > {target}"
        )));
    }
    let mut by_remainder: Vec<usize> = (0..ideals.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = ideals[a] - ideals[a].floor();
        let rb = ideals[b] - ideals[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in by_remainder.iter().take((target - assigned) as usize) {
        counts[i] += 1;
    }
    if counts.iter().any(|&m| m == 0) {
        return Err(Error::Invariant("empty interior band after rounding".into()));
    }

    // Exact latitudes from cumulative counts: cos(theta_i) = cos(theta0) - (2/k) * sum m_j.
    let mut latitudes = Vec::with_capacity(n as usize + 3);
    let mut cos_latitudes = Vec::with_capacity(n as usize + 3);
    latitudes.push(0.0);
    cos_latitudes.push(1.0);
    latitudes.push(theta0);
    cos_latitudes.push(cos_theta0);
    let mut cum = 0u32;
    for (i, &m) in counts.iter().enumerate() {
        cum += m;
        if i + 1 == n as usize {
            latitudes.push(std::f64::consts::PI - theta0);
            cos_latitudes.push(-cos_theta0);
        } else {
            let c = (cos_theta0 - 2.0 * cum as f64 / kf).clamp(-1.0, 1.0);
            latitudes.push(c.acos());
            cos_latitudes.push(c);
        }
    }
    latitudes.push(std::f64::consts::PI);
    cos_latitudes.push(-1.0);

    let mut sector_counts = Vec::with_capacity(n as usize + 2);
    sector_counts.push(6);
    sector_counts.extend_from_slice(&counts);
    sector_counts.push(6);

    for w in latitudes.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Invariant(format!(
                "band latitudes not strictly increasing: {} >= {}",
                w[0], w[1]
            )));
        }
    }

    Ok(EqualAreaPartition {
        k,
        n,
        theta0,
        latitudes,
        cos_latitudes,
        approx_latitudes: approx,
        sector_counts,
        delta,
    })
}

impl EqualAreaPartition {
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of interior bands.
    pub fn interior_bands(&self) -> u32 {
        self.n
    }

    /// Cap colatitude `arccos(1 - 12/k)`.
    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// Lower boundary colatitude of `band`.
    pub fn band_lower(&self, band: u32) -> f64 {
        self.latitudes[band as usize]
    }

    /// Upper boundary colatitude of `band`.
    pub fn band_upper(&self, band: u32) -> f64 {
        self.latitudes[band as usize + 1]
    }

    /// Regions in `band`.
    pub fn sectors_in_band(&self, band: u32) -> u32 {
        self.sector_counts[band as usize]
    }

    /// Equally spaced approximate latitudes the locator inverts.
    pub fn approx_latitudes(&self) -> &[f64] {
        &self.approx_latitudes
    }

    fn check_region(&self, id: RegionId) -> Result<()> {
        if id.band as usize >= self.sector_counts.len() {
            return Err(Error::Parameter(format!(
                "band {} out of range 0..={}",
                id.band,
                self.n + 1
            )));
        }
        let m = self.sector_counts[id.band as usize];
        if id.sector < 1 || id.sector > m {
            return Err(Error::Parameter(format!(
                "sector {} out of range 1..={m} in band {}",
                id.sector, id.band
            )));
        }
        Ok(())
    }

    /// Iterates all `k` regions, band-major.
    pub fn regions(&self) -> impl Iterator<Item = RegionId> + '_ {
        self.sector_counts
            .iter()
            .enumerate()
            .flat_map(|(band, &m)| (1..=m).map(move |sector| RegionId { band: band as u32, sector }))
    }

    /// Spherical area of a region, `2*pi*(cos lower - cos upper) / m`.
    pub fn region_area(&self, id: RegionId) -> Result<f64> {
        self.check_region(id)?;
        let b = id.band as usize;
        let m = self.sector_counts[b] as f64;
        Ok(TWO_PI * (self.cos_latitudes[b] - self.cos_latitudes[b + 1]) / m)
    }

    /// Region containing `p` under the half-open convention. O(1): the band
    /// is read off the arithmetic progression of approximate latitudes, then
    /// corrected within a +-3 window (widened with a warning if ever needed).
    pub fn locate(&self, p: &UnitPoint) -> RegionId {
        let theta = p.theta();
        let band = self.locate_band(theta);
        let m = self.sector_counts[band as usize];
        let mut sector = (p.phi() * m as f64 / TWO_PI).floor() as u32 + 1;
        if sector > m {
            sector = m;
        }
        RegionId { band, sector }
    }

    fn locate_band(&self, theta: f64) -> u32 {
        let n = self.n as usize;
        if theta < self.theta0 {
            return 0;
        }
        if theta >= self.latitudes[n + 1] {
            return self.n + 1;
        }
        let guess = ((theta - self.theta0) / self.delta).floor() as i64 + 1;
        let lo = (guess - 3).max(1) as usize;
        let hi = (guess + 3).min(n as i64) as usize;
        for band in lo..=hi {
            if self.latitudes[band] <= theta && theta < self.latitudes[band + 1] {
                return band as u32;
            }
        }
        log::warn!(
            "locate window [{lo}, {hi}] missed colatitude {theta}; widening to a full scan"
        );
        for band in 1..=n {
            if self.latitudes[band] <= theta && theta < self.latitudes[band + 1] {
                return band as u32;
            }
        }
        // theta in [theta0, theta_n) is covered by the scan above.
        unreachable!("colatitude {theta} not located in any band");
    }

    /// True if `p` lies strictly inside the open spherical rectangle of `id`.
    pub fn strictly_inside(&self, id: RegionId, p: &UnitPoint) -> bool {
        let b = id.band as usize;
        let theta = p.theta();
        if !(self.latitudes[b] < theta && theta < self.latitudes[b + 1]) {
            return false;
        }
        let m = self.sector_counts[b] as f64;
        let left = TWO_PI * (id.sector - 1) as f64 / m;
        let right = TWO_PI * id.sector as f64 / m;
        left < p.phi() && p.phi() < right
    }

    /// Spherical-coordinate center of a region.
    pub fn region_center(&self, id: RegionId) -> Result<UnitPoint> {
        self.check_region(id)?;
        let b = id.band as usize;
        let theta = 0.5 * (self.latitudes[b] + self.latitudes[b + 1]);
        let m = self.sector_counts[b] as f64;
        let phi = TWO_PI * (id.sector as f64 - 0.5) / m;
        UnitPoint::from_spherical(theta, phi)
    }

    /// Boundary sample points: the four corners plus `per_edge` interior
    /// points on each of the four boundary curves.
    pub fn boundary_samples(&self, id: RegionId, per_edge: usize) -> Result<Vec<UnitPoint>> {
        self.check_region(id)?;
        let b = id.band as usize;
        let (t_lo, t_hi) = (self.latitudes[b], self.latitudes[b + 1]);
        let m = self.sector_counts[b] as f64;
        let left = TWO_PI * (id.sector - 1) as f64 / m;
        let right = TWO_PI * id.sector as f64 / m;
        let steps = per_edge + 1;
        let mut out = Vec::with_capacity(4 * steps + 4);
        let sph = |theta: f64, phi: f64| {
            let phi = if phi >= TWO_PI { phi - TWO_PI } else { phi };
            UnitPoint::from_spherical(theta, phi)
        };
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let phi = left + t * (right - left);
            out.push(sph(t_lo, phi)?);
            out.push(sph(t_hi, phi)?);
            let theta = t_lo + t * (t_hi - t_lo);
            out.push(sph(theta, left)?);
            out.push(sph(theta, right)?);
        }
        Ok(out)
    }

    /// Maximum over regions of the sampled Euclidean diameter; guaranteed
    /// `<= 7 / sqrt(k)`.
    pub fn diameter_audit(&self, per_edge: usize) -> f64 {
        let mut max = 0.0f64;
        for id in self.regions() {
            let pts = self.boundary_samples(id, per_edge).expect("region id from iterator");
            for (a, p) in pts.iter().enumerate() {
                for q in &pts[a + 1..] {
                    let d = crate::sphere::euclidean_dist(p, q);
                    if d > max {
                        max = d;
                    }
                }
            }
        }
        max
    }

    /// Minimum over regions of the Euclidean distance from the region center
    /// to its sampled boundary; guaranteed `>= 0.77970 / sqrt(k)`.
    pub fn inradius_audit(&self, per_edge: usize) -> f64 {
        let mut min = f64::INFINITY;
        for id in self.regions() {
            let c = self.region_center(id).expect("region id from iterator");
            let pts = self.boundary_samples(id, per_edge).expect("region id from iterator");
            for p in &pts {
                let d = crate::sphere::euclidean_dist(&c, p);
                if d < min {
                    min = d;
                }
            }
        }
        min
    }

    /// Contract value `7 / sqrt(k)` for the diameter audit.
    pub fn diameter_bound(&self) -> f64 {
        REGION_DIAMETER_COEFF / (self.k as f64).sqrt()
    }

    /// Contract value `0.77970 / sqrt(k)` for the inradius audit.
    pub fn inradius_bound(&self) -> f64 {
        CAP_INRADIUS_COEFF / (self.k as f64).sqrt()
    }

    /// Maximum relative deviation of region areas from `4*pi/k`.
    pub fn area_max_rel_err(&self) -> f64 {
        let ideal = 4.0 * std::f64::consts::PI / self.k as f64;
        self.regions()
            .map(|id| (self.region_area(id).expect("region id from iterator") - ideal).abs() / ideal)
            .fold(0.0, f64::max)
    }
}
