//! Static SVG renderings: the dual graph of the resolution and fiber-root
//! trajectories along monodromy loops.

use crate::job::Job;
use crate::report::{section_options, Report};
use arcsection::decide::{setup_projection, CrossingReport, CrossingStatus, ProjectionSetup};
use arcsection::polyarith::{parse_rat, MPoly};
use arcsection::monodromy::crossing::crossing_loops;
use arcsection::monodromy::{track_loop_full, LoopSpec, TrackOptions};
use arcsection::resolve::{DivisorKind, ResolutionTree};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Dual graph: one node per divisor (exceptional on top, discriminant
/// branches below), one edge per normal crossing labelled with its id and,
/// when tracked, the cycle types of its two permutations.
pub fn dual_graph(tree: &ResolutionTree, crossings: &[CrossingReport]) -> String {
    let mut kinds: BTreeMap<String, DivisorKind> = BTreeMap::new();
    for c in &tree.crossings {
        for b in &c.branches {
            kinds.insert(b.label.clone(), b.kind);
        }
    }
    for ch in &tree.charts {
        for d in &ch.divisors {
            kinds.entry(d.label.clone()).or_insert(d.kind);
        }
    }
    let row = |k: DivisorKind| -> Vec<&String> { kinds.iter().filter(|(_, v)| **v == k).map(|(l, _)| l).collect() };
    let (top, bottom) = (row(DivisorKind::Exceptional), row(DivisorKind::Strict));
    let width = 120.0 * (top.len().max(bottom.len()).max(1) as f64) + 80.0;
    let height = 320.0;
    let mut pos: BTreeMap<&String, (f64, f64)> = BTreeMap::new();
    for (labels, y) in [(&top, 80.0), (&bottom, 240.0)] {
        let step = width / (labels.len() as f64 + 1.0);
        for (i, l) in labels.iter().enumerate() {
            pos.insert(*l, (step * (i as f64 + 1.0), y));
        }
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut multiplicity: BTreeMap<(String, String), usize> = BTreeMap::new();
    for c in &tree.crossings {
        let (a, b) = (&c.branches[0].label, &c.branches[1].label);
        let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        let k = multiplicity.entry(key).or_insert(0);
        let bend = 30.0 * (*k as f64) * if *k % 2 == 0 { 1.0 } else { -1.0 };
        *k += 1;
        let (Some(&(x1, y1)), Some(&(x2, y2))) = (pos.get(a), pos.get(b)) else {
            continue;
        };
        let (mx, my) = ((x1 + x2) / 2.0 + bend, (y1 + y2) / 2.0);
        let rep = crossings.iter().find(|r| r.id == c.id);
        let (dash, tag) = match rep {
            Some(r) if r.status == CrossingStatus::Pruned => (r#" stroke-dasharray="4 3""#, "pruned".to_string()),
            Some(r) => (
                "",
                r.cycle_types
                    .as_ref()
                    .map(|t| format!("{:?} {:?}", t[0], t[1]))
                    .unwrap_or_else(|| "failed".into()),
            ),
            None => ("", String::new()),
        };
        let _ = writeln!(
            s,
            r##"<path d="M {x1:.1} {y1:.1} Q {mx:.1} {my:.1} {x2:.1} {y2:.1}" fill="none" stroke="#555"{dash}/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">#{} {}</text>"#,
            (x1 + x2) / 4.0 + mx / 2.0,
            (y1 + y2) / 4.0 + my / 2.0 - 4.0,
            c.id,
            escape(&tag)
        );
    }
    for (l, (x, y)) in &pos {
        let fill = if kinds[*l] == DivisorKind::Exceptional { "#dbe9f6" } else { "#fde0c5" };
        let _ = writeln!(
            s,
            r##"<circle cx="{x:.1}" cy="{y:.1}" r="18" fill="{fill}" stroke="#333"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            y + 4.0,
            escape(l)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Real and imaginary parts of the tracked fiber roots against `θ`.
pub fn trajectory_plot(title: &str, samples: &[(f64, Vec<Complex64>)]) -> String {
    let (w, h, pad) = (640.0, 260.0, 40.0);
    let mut s = String::new();
    let total_h = 2.0 * h + 40.0;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{total_h:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{pad}" y="20">{}</text>"#, escape(title));
    let n = samples.first().map(|(_, z)| z.len()).unwrap_or(0);
    for (panel, (name, part)) in [("Re z", 0usize), ("Im z", 1usize)].into_iter().enumerate() {
        let top = 30.0 + panel as f64 * (h + 10.0);
        let value = |z: &Complex64| if part == 0 { z.re } else { z.im };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (_, zs) in samples {
            for z in zs {
                lo = lo.min(value(z));
                hi = hi.max(value(z));
            }
        }
        if !(hi > lo) {
            lo -= 1.0;
            hi += 1.0;
        }
        let sx = |t: f64| pad + (w - 2.0 * pad) * t / TAU;
        let sy = |v: f64| top + h - pad / 2.0 - (h - pad) * (v - lo) / (hi - lo);
        let _ = writeln!(
            s,
            r##"<rect x="{pad}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#999"/>"##,
            w - 2.0 * pad,
            h - pad / 2.0
        );
        let _ = writeln!(s, r#"<text x="4" y="{:.1}">{name}</text>"#, top + 14.0);
        let _ = writeln!(
            s,
            r#"<text x="{pad}" y="{:.1}">{hi:.3e}</text><text x="{pad}" y="{:.1}">{lo:.3e}</text>"#,
            top + 12.0,
            top + h - pad / 2.0 - 2.0
        );
        for k in 0..n {
            let pts: Vec<String> = samples
                .iter()
                .filter_map(|(t, zs)| zs.get(k).map(|z| format!("{:.2},{:.2}", sx(*t), sy(value(z)))))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                pts.join(" "),
                PALETTE[k % PALETTE.len()]
            );
        }
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">θ ∈ [0, 2π]</text>"#, w - pad, total_h - 6.0);
    s.push_str("</svg>\n");
    s
}

/// Trajectory plots for both loops of every tracked crossing, named
/// `crossing-<id>-loop<k>.svg`.
pub fn crossing_trajectories(
    setup: &ProjectionSetup,
    tree: &ResolutionTree,
    crossings: &[CrossingReport],
    opts: &TrackOptions,
) -> Vec<(String, String)> {
    let opts = TrackOptions {
        record_trajectory: true,
        ..*opts
    };
    let mut out = Vec::new();
    for c in &tree.crossings {
        let tracked = crossings
            .iter()
            .any(|r| r.id == c.id && r.status == CrossingStatus::Tracked);
        let Some(chart) = tree.chart(&c.chart) else { continue };
        if !tracked {
            continue;
        }
        let loops = crossing_loops(chart, c, setup.sheets());
        for (k, lp) in loops.iter().enumerate() {
            if let Some(svg) = loop_plot(&setup.adapted, lp, &opts) {
                out.push((format!("crossing-{}-loop{}.svg", c.id, k + 1), svg));
            }
        }
    }
    out
}

/// Trajectory plot of the loop `|t| = radius` of an exact arc.
pub fn arc_trajectory(
    setup: &ProjectionSetup,
    x: &MPoly,
    y: &MPoly,
    radius: f64,
    opts: &TrackOptions,
) -> Option<String> {
    let opts = TrackOptions {
        record_trajectory: true,
        ..*opts
    };
    let lp = LoopSpec::from_arc(x, y, radius, setup.sheets());
    loop_plot(&setup.adapted, &lp, &opts)
}

fn loop_plot(f: &MPoly, lp: &LoopSpec, opts: &TrackOptions) -> Option<String> {
    let o = track_loop_full(f, lp, opts).ok()?;
    let title = format!("{} — permutation {}", lp.description, o.permutation.cycle_notation());
    Some(trajectory_plot(&title, &o.trajectory))
}

/// All renderings for a finished report: the dual graph when a resolution
/// was computed, crossing-loop trajectories, and the generic loop.
pub fn render(job: &Job, report: &Report) -> Vec<(String, String)> {
    let mut out = Vec::new();
    if let Some(tree) = &report.tree {
        out.push(("dual-graph.svg".to_string(), dual_graph(tree, &report.crossings)));
    }
    let Ok(setup) = setup_projection(&job.surface, &job.direction) else {
        return out;
    };
    let opts = section_options(job).track;
    if let Some(tree) = &report.tree {
        out.extend(crossing_trajectories(&setup, tree, &report.crossings, &opts));
    }
    if let Some(g) = &report.generic {
        if let (Some(a), Some(b)) = (parse_rat(&g.direction[0]), parse_rat(&g.direction[1])) {
            let t = MPoly::var("t", &["t"]);
            if let Some(svg) = arc_trajectory(&setup, &t.scale(&a), &t.scale(&b), g.radius, &opts) {
                out.push(("generic-loop.svg".to_string(), svg));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectory_plot_has_one_polyline_per_root_and_panel() {
        let samples: Vec<(f64, Vec<Complex64>)> = (0..=16)
            .map(|k| {
                let t = TAU * k as f64 / 16.0;
                let r = Complex64::from_polar(1.0, t / 2.0);
                (t, vec![r, -r])
            })
            .collect();
        let s = trajectory_plot("z^2 - t", &samples);
        assert_eq!(s.matches("<polyline").count(), 4);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    }
}
