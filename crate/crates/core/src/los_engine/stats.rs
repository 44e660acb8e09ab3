//! CLoS/BLoS segmentation and the pooled duration statistics.
//!
//! Durations are kept as whole sample counts; bin `k` (1-based) of the
//! histogram holds segments of exactly `k·Δt` seconds.

use serde::{Deserialize, Serialize};

use super::LosTimeline;
use crate::error::{domain, Result};

/// Run lengths (in samples) of one timeline.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentSet {
    pub clos_samples: Vec<u32>,
    pub blos_samples: Vec<u32>,
}

impl SegmentSet {
    pub fn clos_durations_s(&self, dt_s: f64) -> Vec<f64> {
        self.clos_samples.iter().map(|&c| c as f64 * dt_s).collect()
    }

    pub fn blos_durations_s(&self, dt_s: f64) -> Vec<f64> {
        self.blos_samples.iter().map(|&c| c as f64 * dt_s).collect()
    }

    pub fn los_samples(&self) -> u64 {
        self.clos_samples.iter().map(|&c| c as u64).sum()
    }

    pub fn total_samples(&self) -> u64 {
        self.los_samples() + self.blos_samples.iter().map(|&c| c as u64).sum::<u64>()
    }
}

/// Run-length encodes a timeline into maximal LoS and blocked runs.
pub fn segment_timeline(tl: &LosTimeline) -> SegmentSet {
    let mut out = SegmentSet::default();
    let mut iter = tl.flags.iter().copied();
    let Some(mut state) = iter.next() else {
        return out;
    };
    let mut run = 1u32;
    let push = |state: bool, run: u32, out: &mut SegmentSet| {
        if state {
            out.clos_samples.push(run)
        } else {
            out.blos_samples.push(run)
        }
    };
    for flag in iter {
        if flag == state {
            run += 1;
        } else {
            push(state, run, &mut out);
            state = flag;
            run = 1;
        }
    }
    push(state, run, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LosStatistics {
    pub n_realizations: usize,
    pub window_s: f64,
    pub dt_s: f64,
    pub p_los: f64,
    pub p_blos: f64,
    pub n_clos_segments: u64,
    pub n_blos_segments: u64,
    /// `histogram[k-1]` counts CLoS segments lasting `k·Δt`.
    pub histogram: Vec<u64>,
    pub blos_histogram: Vec<u64>,
    pub mu_clos_s: Option<f64>,
    pub sigma_clos_s: Option<f64>,
    /// Most frequent CLoS duration (smallest on ties).
    pub gamma_clos_s: Option<f64>,
    /// Empty when the link never had line of sight.
    pub time_share: Vec<f64>,
    pub ccdf: Vec<f64>,
}

impl LosStatistics {
    pub fn n_bins(&self) -> usize {
        self.histogram.len()
    }

    /// Upper edge `t^k = k·Δt` of bin `k` (1-based).
    pub fn bin_time(&self, k: usize) -> f64 {
        k as f64 * self.dt_s
    }

    fn los_mass(&self) -> u64 {
        self.histogram.iter().sum()
    }
}

/// Pools segment sets from independent realizations of the same window.
pub fn aggregate(sets: &[SegmentSet], dt_s: f64, window_s: f64) -> Result<LosStatistics> {
    if sets.is_empty() {
        return Err(domain("cannot aggregate zero realizations"));
    }
    let n_bins = super::window_samples(window_s, dt_s)?;
    let mut histogram = vec![0u64; n_bins];
    let mut blos_histogram = vec![0u64; n_bins];
    let mut los_samples = 0u64;
    for (i, set) in sets.iter().enumerate() {
        if set.total_samples() != n_bins as u64 {
            return Err(domain(format!("realization {i} covers {} samples, expected {n_bins}", set.total_samples())));
        }
        for &c in &set.clos_samples {
            histogram[c as usize - 1] += 1;
        }
        for &c in &set.blos_samples {
            blos_histogram[c as usize - 1] += 1;
        }
        los_samples += set.los_samples();
    }

    let total = (n_bins * sets.len()) as f64;
    let p_los = los_samples as f64 / total;
    let n_clos: u64 = histogram.iter().sum();

    let (mu, sigma, gamma) = if n_clos == 0 {
        (None, None, None)
    } else {
        let n = n_clos as f64;
        let mean = histogram.iter().enumerate().map(|(k, &h)| h as f64 * (k + 1) as f64 * dt_s).sum::<f64>() / n;
        let ss = histogram
            .iter()
            .enumerate()
            .map(|(k, &h)| {
                let dev = (k + 1) as f64 * dt_s - mean;
                h as f64 * dev * dev
            })
            .sum::<f64>();
        let sigma = if n_clos > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
        // first maximum wins ties
        let mode_bin =
            histogram.iter().enumerate().fold((0usize, 0u64), |best, (k, &h)| if h > best.1 { (k, h) } else { best }).0;
        (Some(mean), Some(sigma), Some((mode_bin + 1) as f64 * dt_s))
    };

    let mut stats = LosStatistics {
        n_realizations: sets.len(),
        window_s,
        dt_s,
        p_los,
        p_blos: 1.0 - p_los,
        n_clos_segments: n_clos,
        n_blos_segments: blos_histogram.iter().sum(),
        histogram,
        blos_histogram,
        mu_clos_s: mu,
        sigma_clos_s: sigma,
        gamma_clos_s: gamma,
        time_share: Vec::new(),
        ccdf: Vec::new(),
    };
    if n_clos > 0 {
        stats.time_share = clos_time_share(&stats)?;
        stats.ccdf = clos_ccdf(&stats)?;
    }
    Ok(stats)
}

/// Fraction of LoS time spent in segments of each length, `h_k·t^k / Σ h_i·t^i`.
pub fn clos_time_share(stats: &LosStatistics) -> Result<Vec<f64>> {
    if stats.los_mass() == 0 {
        return Err(domain("time share undefined: the link never had line of sight"));
    }
    // Δt cancels, so weigh by bin index
    let weighted: Vec<u64> = stats.histogram.iter().enumerate().map(|(k, &h)| h * (k as u64 + 1)).collect();
    let total: u64 = weighted.iter().sum();
    Ok(weighted.iter().map(|&w| w as f64 / total as f64).collect())
}

/// Conditional CCDF `F(t^k | LoS) = Σ_{i≥k} h_i / Σ h_i`.
pub fn clos_ccdf(stats: &LosStatistics) -> Result<Vec<f64>> {
    let total = stats.los_mass();
    if total == 0 {
        return Err(domain("CCDF undefined: the link never had line of sight"));
    }
    let mut tail = 0u64;
    let mut out = vec![0.0; stats.histogram.len()];
    for (k, &h) in stats.histogram.iter().enumerate().rev() {
        tail += h;
        out[k] = tail as f64 / total as f64;
    }
    Ok(out)
}

/// Probability that a transmission needing `t_h_s` of continuous LoS fails.
///
/// `t_h_s` is rounded up to the next bin edge.
pub fn outage_probability(stats: &LosStatistics, t_h_s: f64) -> Result<f64> {
    if !(t_h_s > 0.0 && t_h_s <= stats.window_s + 1e-9) {
        return Err(domain(format!("t_h = {t_h_s} s outside (0, {}] s", stats.window_s)));
    }
    if stats.los_mass() == 0 {
        return Ok(1.0);
    }
    let k = ((t_h_s / stats.dt_s) - 1e-9).ceil().clamp(1.0, stats.n_bins() as f64) as usize;
    let f = if stats.ccdf.is_empty() { clos_ccdf(stats)?[k - 1] } else { stats.ccdf[k - 1] };
    Ok((stats.p_blos + stats.p_los * (1.0 - f)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tl(flags: &[bool]) -> LosTimeline {
        LosTimeline { dt_s: 0.1, flags: flags.to_vec(), blocker_log: None }
    }

    #[test]
    fn run_length_encoding() {
        let s = segment_timeline(&tl(&[true, true, false, true]));
        assert_eq!(s.clos_samples, vec![2, 1]);
        assert_eq!(s.blos_samples, vec![1]);
        let d = s.clos_durations_s(0.1);
        assert!((d[0] - 0.2).abs() < 1e-12 && (d[1] - 0.1).abs() < 1e-12);
        assert_eq!(s.total_samples(), 4);

        let all = segment_timeline(&tl(&[true; 600]));
        assert_eq!(all.clos_samples, vec![600]);
        assert!((all.clos_durations_s(0.1)[0] - 60.0).abs() < 1e-12);
        assert!(segment_timeline(&tl(&[])).clos_samples.is_empty());
    }

    #[test]
    fn single_clear_window() {
        let s = segment_timeline(&tl(&[true; 600]));
        let st = aggregate(&[s], 0.1, 60.0).unwrap();
        assert_eq!(st.p_los, 1.0);
        assert_eq!(st.histogram[599], 1);
        assert_eq!(st.histogram.iter().sum::<u64>(), 1);
        assert_eq!(st.gamma_clos_s, Some(60.0));
        assert_eq!(st.time_share[599], 1.0);
        assert!(st.ccdf.iter().all(|&f| f == 1.0));
        assert_eq!(outage_probability(&st, 60.0).unwrap(), 0.0);
    }

    fn two_segment_stats() -> LosStatistics {
        // one 0.2 s segment, one 0.1 s segment, in a 0.4 s window
        aggregate(&[segment_timeline(&tl(&[true, true, false, true]))], 0.1, 0.4).unwrap()
    }

    #[test]
    fn share_and_ccdf_by_hand() {
        let st = two_segment_stats();
        assert!((st.time_share[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((st.time_share[0] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(st.ccdf[0], 1.0);
        assert_eq!(st.ccdf[1], 0.5);
        assert_eq!(st.ccdf[2], 0.0);
        assert!((st.p_los - 0.75).abs() < 1e-12);
        assert_eq!(st.gamma_clos_s, Some(0.1));
        assert!((st.mu_clos_s.unwrap() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn shares_survive_duplication() {
        let s = segment_timeline(&tl(&[true, true, false, true]));
        let a = two_segment_stats();
        let b = aggregate(&[s.clone(), s], 0.1, 0.4).unwrap();
        assert_eq!(a.time_share, b.time_share);
        assert_eq!(a.ccdf, b.ccdf);
    }

    #[test]
    fn outage_formula() {
        let mut st = two_segment_stats();
        st.p_blos = 0.2;
        st.p_los = 0.8;
        st.ccdf = vec![1.0, 0.75, 0.0, 0.0];
        assert!((outage_probability(&st, 0.2).unwrap() - 0.4).abs() < 1e-12);
        // snaps up to the 0.2 s edge
        assert!((outage_probability(&st, 0.15).unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(outage_probability(&st, 0.1).unwrap(), 0.2);
        assert!(outage_probability(&st, 0.0).is_err());
        assert!(outage_probability(&st, 0.5).is_err());
    }

    #[test]
    fn all_blocked() {
        let st = aggregate(&[segment_timeline(&tl(&[false; 4]))], 0.1, 0.4).unwrap();
        assert_eq!(st.p_los, 0.0);
        assert_eq!(st.p_blos, 1.0);
        assert!(st.mu_clos_s.is_none());
        assert!(clos_time_share(&st).is_err());
        assert!(clos_ccdf(&st).is_err());
        assert_eq!(outage_probability(&st, 0.1).unwrap(), 1.0);
    }

    #[test]
    fn aggregate_rejects_bad_input() {
        assert!(aggregate(&[], 0.1, 60.0).is_err());
        let short = segment_timeline(&tl(&[true; 10]));
        assert!(aggregate(&[short], 0.1, 60.0).is_err());
    }
}
