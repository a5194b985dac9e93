//! Predictor–corrector tracking of fiber roots around a circle.
//!
//! The parameter runs over `t(θ) = c + r·e^{iθ}`, `θ ∈ [0, 2π]`.  Each step
//! predicts the roots linearly in `θ` (implicit-function derivative), then
//! corrects all roots simultaneously with a warm-started Aberth iteration.
//! A step is accepted only when every new root has a certified inclusion disk
//! much smaller than the root separation and every root moved less than one
//! third of the minimum separation; nearest-neighbor matching is then
//! unambiguous.  Rejected steps are halved.  If a pass accepts a step whose
//! motion exceeds one third of the separation found later on the loop, the
//! loop is re-tracked with that separation as a fixed floor, so the recorded
//! certificate always satisfies `max motion < min separation / 3`.

use super::family::FiberFamily;
use super::MonodromyError;
use crate::group::Permutation;
use crate::polyarith::{aberth, certify_roots, horner, univariate_roots};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::TAU;

/// Evidence that a tracked loop was resolved unambiguously.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingCertificate {
    /// Accepted steps in the final pass.
    pub steps: usize,
    /// Smallest pairwise distance between tracked roots over all samples.
    pub min_root_separation: f64,
    /// Largest single-step root motion.
    pub max_step_perturbation: f64,
    /// Number of extra passes with a tightened separation floor.
    pub refinement_passes: usize,
    /// Rejected (halved) steps in the final pass.
    pub halvings: usize,
}

/// Tracking parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackOptions {
    /// Initial number of uniform steps around the loop.
    pub initial_steps: usize,
    /// Cap on step attempts per pass.
    pub step_cap: usize,
    /// Record a braid word (real-part projection).
    pub braids: bool,
    /// Record root positions at every accepted step.
    pub record_trajectory: bool,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            initial_steps: 64,
            step_cap: 1 << 20,
            braids: false,
            record_trajectory: false,
        }
    }
}

/// One Artin generator `σ_index^{±1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidLetter {
    pub index: usize,
    pub positive: bool,
}

/// Braid word in Artin generators on `strands` strands.
///
/// Convention: strands are ordered by real part (ties by imaginary part).
/// When the strands at positions `i` and `i+1` exchange, the letter is
/// `σ_i` if the strand moving right has the smaller imaginary part at the
/// exchange, and `σ_i^{-1}` otherwise.  With this convention `z² - t`
/// around `|t| = 1` gives `σ_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<BraidLetter>,
}

impl BraidWord {
    /// Text like `s0 s2 s1^-1`; empty word is `1`.
    pub fn to_text(&self) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        self.letters
            .iter()
            .map(|l| {
                if l.positive {
                    format!("s{}", l.index)
                } else {
                    format!("s{}^-1", l.index)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Underlying permutation: strand starting at position `i` ends at
    /// position `perm(i)`.
    pub fn permutation(&self) -> Permutation {
        let mut at: Vec<usize> = (0..self.strands).collect(); // position -> strand
        for l in &self.letters {
            at.swap(l.index, l.index + 1);
        }
        let mut images = vec![0; self.strands];
        for (pos, &strand) in at.iter().enumerate() {
            images[strand] = pos;
        }
        Permutation::from_images(images).expect("braid permutation")
    }
}

/// Result of tracking one loop.
#[derive(Clone, Debug, PartialEq)]
pub struct TrackOutcome {
    pub permutation: Permutation,
    pub certificate: TrackingCertificate,
    /// Fiber roots at the basepoint, in label order.
    pub basepoint_fiber: Vec<Complex64>,
    pub braid: Option<BraidWord>,
    /// `(θ, roots in label order)` samples when requested.
    pub trajectory: Vec<(f64, Vec<Complex64>)>,
}

fn lexcmp(a: Complex64, b: Complex64, tol: f64) -> Ordering {
    if (a.re - b.re).abs() <= tol {
        a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)
    } else {
        a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal)
    }
}

fn min_separation(z: &[Complex64]) -> f64 {
    let mut s = f64::INFINITY;
    for i in 0..z.len() {
        for j in 0..i {
            s = s.min((z[i] - z[j]).norm());
        }
    }
    s
}

fn check_leading(c: &[Complex64], t: Complex64) -> Result<(), MonodromyError> {
    let lead = c[c.len() - 1].norm();
    let maxc = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(lead > 1e-12 * maxc) {
        return Err(MonodromyError::FiberDegenerate(format!(
            "leading coefficient vanishes near t = {t}"
        )));
    }
    Ok(())
}

/// Fiber roots at `t`, labelled: the `sheets` smallest in modulus first
/// (sorted by real part, ties by imaginary part), then the remaining ones.
pub fn labelled_fiber(
    fam: &FiberFamily,
    t: Complex64,
    sheets: Option<usize>,
) -> Result<Vec<Complex64>, MonodromyError> {
    let c = fam.at(t);
    check_leading(&c, t)?;
    let boxes = univariate_roots(&c)?;
    let roots: Vec<Complex64> = boxes.iter().map(|b| b.center()).collect();
    for i in 0..boxes.len() {
        for j in 0..i {
            if boxes[i].overlaps(&boxes[j]) {
                return Err(MonodromyError::LoopTouchesDelta(format!(
                    "fiber over t = {t} has a multiple root"
                )));
            }
        }
    }
    let d = roots.len();
    let k = sheets.unwrap_or(d).min(d);
    let mut by_mod: Vec<Complex64> = roots.clone();
    by_mod.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    if k < d {
        let inner = by_mod[k - 1].norm();
        let outer = by_mod[k].norm();
        if outer < 2.0 * inner {
            return Err(MonodromyError::FiberDegenerate(format!(
                "sheets not separated over t = {t} ({inner:.3e} vs {outer:.3e})"
            )));
        }
    }
    let scale = 1.0 + by_mod.last().map(|z| z.norm()).unwrap_or(0.0);
    let tol = 1e-9 * scale;
    let mut head: Vec<Complex64> = by_mod[..k].to_vec();
    let mut tail: Vec<Complex64> = by_mod[k..].to_vec();
    head.sort_by(|a, b| lexcmp(*a, *b, tol));
    tail.sort_by(|a, b| lexcmp(*a, *b, tol));
    head.extend(tail);
    Ok(head)
}

struct PassResult {
    perm_full: Vec<usize>,
    cert: TrackingCertificate,
    braid: Option<BraidWord>,
    trajectory: Vec<(f64, Vec<Complex64>)>,
}

/// Track the fiber of `fam` around `|t - center| = radius`.  With
/// `sheets = Some(d)` only the `d` smallest roots at the basepoint are
/// labelled and reported (the others are tracked but must stay apart).
pub fn track_circle(
    fam: &FiberFamily,
    center: Complex64,
    radius: f64,
    sheets: Option<usize>,
    opts: &TrackOptions,
) -> Result<TrackOutcome, MonodromyError> {
    if fam.degree() == 0 {
        return Err(MonodromyError::FiberDegenerate("fiber has degree 0".into()));
    }
    let roots0 = labelled_fiber(fam, center + radius, sheets)?;
    let k = sheets.unwrap_or(roots0.len()).min(roots0.len());
    let mut floor = f64::INFINITY;
    let mut passes = 0;
    let result = loop {
        let r = track_pass(fam, center, radius, &roots0, k, floor, opts)?;
        if r.cert.max_step_perturbation < r.cert.min_root_separation / 3.0 || passes >= 4 {
            if r.cert.max_step_perturbation >= r.cert.min_root_separation / 3.0 {
                return Err(MonodromyError::Certification(
                    "matching-radius criterion not met after refinement".into(),
                ));
            }
            break r;
        }
        floor = r.cert.min_root_separation;
        passes += 1;
    };
    let images: Vec<usize> = result.perm_full[..k].to_vec();
    if images.iter().any(|&j| j >= k) {
        return Err(MonodromyError::Certification(
            "tracked sheets mix with roots outside the Weierstrass domain".into(),
        ));
    }
    let permutation = Permutation::from_images(images)
        .map_err(|e| MonodromyError::Certification(e.to_string()))?;
    if let Some(b) = &result.braid {
        if b.permutation() != permutation {
            return Err(MonodromyError::ProjectionDegenerate);
        }
    }
    let mut cert = result.cert;
    cert.refinement_passes = passes;
    Ok(TrackOutcome {
        permutation,
        certificate: cert,
        basepoint_fiber: roots0[..k].to_vec(),
        braid: result.braid,
        trajectory: result.trajectory,
    })
}

#[allow(clippy::too_many_arguments)]
fn track_pass(
    fam: &FiberFamily,
    center: Complex64,
    radius: f64,
    roots0: &[Complex64],
    k: usize,
    floor: f64,
    opts: &TrackOptions,
) -> Result<PassResult, MonodromyError> {
    let tpt = |th: f64| center + Complex64::from_polar(radius, th);
    let n = roots0.len();
    let mut z: Vec<Complex64> = roots0.to_vec();
    let mut theta = 0.0f64;
    let mut h = TAU / opts.initial_steps.max(1) as f64;
    let hmax = TAU / 8.0;
    let mut steps = 0usize;
    let mut attempts = 0usize;
    let mut halvings = 0usize;
    let mut min_sep = min_separation(&z[..]);
    let mut max_motion = 0.0f64;
    let scale0 = 1.0 + z.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let tol = 1e-9 * scale0;
    let mut pos_order: Vec<usize> = (0..k).collect();
    let mut letters: Vec<BraidLetter> = Vec::new();
    let mut trajectory = Vec::new();
    if opts.record_trajectory {
        trajectory.push((0.0, z[..k].to_vec()));
    }
    while theta < TAU {
        attempts += 1;
        if attempts > opts.step_cap {
            return Err(MonodromyError::Certification(format!(
                "step cap {} exceeded at θ = {theta:.6}",
                opts.step_cap
            )));
        }
        let hh = h.min(TAU - theta);
        let last = theta + hh >= TAU;
        let t = tpt(theta);
        let tn = if last { tpt(0.0) } else { tpt(theta + hh) };
        // Linear predictor.
        let ct = fam.at(t);
        let dct = fam.dt_at(t);
        let dtdth = Complex64::new(0.0, 1.0) * Complex64::from_polar(radius, theta);
        let dz_coeffs: Vec<Complex64> = ct.iter().enumerate().skip(1).map(|(j, a)| a * j as f64).collect();
        let pred: Vec<Complex64> = z
            .iter()
            .map(|&zi| {
                let gz = horner(&dz_coeffs, zi);
                let gt = horner(&dct, zi);
                let dz = -(gt * dtdth) / gz;
                if dz.is_finite() {
                    zi + dz * hh
                } else {
                    zi
                }
            })
            .collect();
        let cn = fam.at(tn);
        check_leading(&cn, tn)?;
        let w = aberth(&cn, Some(&pred));
        let sep_w = min_separation(&w);
        let sep_z = min_separation(&z);
        let s = sep_z.min(sep_w).min(floor);
        let mut ok = s > 0.0 && s.is_finite();
        let mut matched = vec![usize::MAX; n];
        let mut motion = 0.0f64;
        if ok {
            let boxes = certify_roots(&cn, &w);
            if boxes.iter().any(|b| b.radius >= s / 6.0) {
                ok = false;
            }
        }
        if ok {
            let mut used = vec![false; n];
            for i in 0..n {
                let (j, dist) = w
                    .iter()
                    .enumerate()
                    .map(|(j, wj)| (j, (wj - z[i]).norm()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                if used[j] || !(dist < s / 3.0) {
                    ok = false;
                    break;
                }
                used[j] = true;
                matched[i] = j;
                motion = motion.max(dist);
            }
        }
        let mut step_letters = Vec::new();
        if ok && opts.braids {
            let wn: Vec<Complex64> = matched.iter().map(|&j| w[j]).collect();
            match braid_events(&z[..k], &wn[..k], &mut pos_order.clone(), tol) {
                Some(ls) => step_letters = ls,
                None => ok = false,
            }
        }
        if !ok {
            h /= 2.0;
            halvings += 1;
            if h < TAU / opts.step_cap as f64 {
                return Err(MonodromyError::Certification(format!(
                    "step size underflow at θ = {theta:.6}"
                )));
            }
            continue;
        }
        let wn: Vec<Complex64> = matched.iter().map(|&j| w[j]).collect();
        if opts.braids {
            // Replay on the real order to keep positions in sync.
            braid_events(&z[..k], &wn[..k], &mut pos_order, tol).expect("replay");
            letters.extend(step_letters);
        }
        z = wn;
        theta = if last { TAU } else { theta + hh };
        steps += 1;
        min_sep = min_sep.min(sep_w);
        max_motion = max_motion.max(motion);
        if opts.record_trajectory {
            trajectory.push((theta, z[..k].to_vec()));
        }
        if motion < s / 12.0 {
            h = (2.0 * h).min(hmax);
        }
    }
    // Close the loop against the basepoint labels.
    let s0 = min_separation(roots0).min(floor);
    let mut perm_full = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in 0..n {
        let (j, dist) = roots0
            .iter()
            .enumerate()
            .map(|(j, r)| (j, (r - z[i]).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if used[j] || !(dist < s0 / 3.0) {
            return Err(MonodromyError::Certification(
                "loop end does not match basepoint fiber".into(),
            ));
        }
        used[j] = true;
        perm_full[i] = j;
    }
    let braid = if opts.braids {
        Some(BraidWord {
            strands: k,
            letters,
        })
    } else {
        None
    };
    Ok(PassResult {
        perm_full,
        cert: TrackingCertificate {
            steps,
            min_root_separation: min_sep,
            max_step_perturbation: max_motion,
            refinement_passes: 0,
            halvings,
        },
        braid,
        trajectory,
    })
}

/// Exchanges of the real-part order between two samples, as braid letters.
/// `pos_order[p]` is the label at position `p`; it is updated in place.
/// Returns `None` if an exchange involves non-adjacent strands.
fn braid_events(
    z: &[Complex64],
    w: &[Complex64],
    pos_order: &mut [usize],
    tol: f64,
) -> Option<Vec<BraidLetter>> {
    let k = z.len();
    let mut events: Vec<(f64, usize, usize, bool)> = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            // a is left of b before, right of b after.
            if lexcmp(z[a], z[b], tol) == Ordering::Less && lexcmp(w[a], w[b], tol) == Ordering::Greater {
                let d0 = z[a].re - z[b].re;
                let d1 = w[a].re - w[b].re;
                let tau = if (d0 - d1).abs() > 0.0 {
                    (d0 / (d0 - d1)).clamp(0.0, 1.0)
                } else {
                    0.5
                };
                let ima = z[a].im + tau * (w[a].im - z[a].im);
                let imb = z[b].im + tau * (w[b].im - z[b].im);
                events.push((tau, a, b, ima < imb));
            }
        }
    }
    events.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
    let mut out = Vec::new();
    for (_, a, b, positive) in events {
        let pa = pos_order.iter().position(|&l| l == a)?;
        let pb = pos_order.iter().position(|&l| l == b)?;
        if pb != pa + 1 {
            return None;
        }
        pos_order.swap(pa, pb);
        out.push(BraidLetter { index: pa, positive });
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::parse_poly;

    fn germ(s: &str) -> FiberFamily {
        FiberFamily::from_germ(&parse_poly(s, &["t", "z"]).unwrap(), "t", "z")
    }

    fn run(s: &str, braids: bool) -> TrackOutcome {
        let opts = TrackOptions {
            braids,
            ..Default::default()
        };
        track_circle(&germ(s), Complex64::new(0.0, 0.0), 1.0, None, &opts).unwrap()
    }

    #[test]
    fn square_root_transposition_and_braid() {
        let r = run("z^2 - t", true);
        assert_eq!(r.permutation.cycle_type(), vec![2]);
        assert_eq!(r.braid.unwrap().to_text(), "s0");
        let c = &r.certificate;
        assert!(c.max_step_perturbation < c.min_root_separation / 3.0);
    }

    #[test]
    fn constant_roots_give_empty_braid() {
        let r = run("(z - 1)*(z - 3)*(z + 2)", true);
        assert!(r.permutation.is_identity());
        assert_eq!(r.braid.unwrap().letters.len(), 0);
    }

    #[test]
    fn cube_root_three_cycle() {
        let r = run("z^3 - t", false);
        assert_eq!(r.permutation.cycle_type(), vec![3]);
    }

    #[test]
    fn sheet_restriction_ignores_far_roots() {
        // z^2 - t together with a root near 1000.
        let fam = germ("(z^2 - t)*(1 - z/1000)");
        let opts = TrackOptions::default();
        let r = track_circle(&fam, Complex64::new(0.0, 0.0), 0.5, Some(2), &opts).unwrap();
        assert_eq!(r.permutation.degree(), 2);
        assert_eq!(r.permutation.cycle_type(), vec![2]);
    }

    #[test]
    fn loop_through_branch_point_is_rejected() {
        let fam = germ("z^2 - t + 1");
        let opts = TrackOptions::default();
        // circle |t| = 1 passes through the branch point t = 1 at θ = 0
        assert!(track_circle(&fam, Complex64::new(0.0, 0.0), 1.0, None, &opts).is_err());
    }
}
