// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Overlay plots of target, initial guess and optimized curves.

use std::fmt::Write;

use elastica::elastica::{segment_eval, ElasticaParams, PlanePoint};

/// Points drawn per elastica segment.
const SEGMENT_POINTS: usize = 200;
const MARGIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Target,
    Guess,
    Optimized,
}

impl Style {
    fn attributes(self, width: f64) -> String {
        match self {
            Style::Target => format!(r##"stroke="#7f7f7f" stroke-width="{}""##, num(3.0 * width)),
            Style::Guess => format!(
                r##"stroke="#d62728" stroke-width="{}" stroke-dasharray="{} {}""##,
                num(width),
                num(4.0 * width),
                num(3.0 * width)
            ),
            Style::Optimized => format!(r##"stroke="#1f77b4" stroke-width="{}""##, num(1.5 * width)),
        }
    }
}

#[derive(Default)]
pub struct Plot {
    paths: Vec<(Style, Vec<PlanePoint>)>,
}

impl Plot {
    pub fn polyline(&mut self, style: Style, points: Vec<PlanePoint>) {
        if points.len() >= 2 {
            self.paths.push((style, points));
        }
    }

    pub fn segment(&mut self, style: Style, p: &ElasticaParams) {
        let pts = (0..=SEGMENT_POINTS)
            .filter_map(|i| segment_eval(p, i as f64 / SEGMENT_POINTS as f64).ok())
            .filter(|q| q.is_finite())
            .collect();
        self.polyline(style, pts);
    }

    /// The SVG document. Plot `y` points up.
    pub fn render(&self) -> String {
        let (mut lo, mut hi) = (PlanePoint::new(f64::MAX, f64::MAX), PlanePoint::new(f64::MIN, f64::MIN));
        for q in self.paths.iter().flat_map(|(_, pts)| pts) {
            lo = PlanePoint::new(lo.x.min(q.x), lo.y.min(q.y));
            hi = PlanePoint::new(hi.x.max(q.x), hi.y.max(q.y));
        }
        if self.paths.is_empty() {
            lo = PlanePoint::ZERO;
            hi = PlanePoint::new(1.0, 1.0);
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let pad = MARGIN * span;
        let (x0, y0) = (lo.x - pad, -hi.y - pad);
        let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
        let stroke = 0.002 * span;

        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
            num(x0),
            num(y0),
            num(w),
            num(h)
        );
        for (style, pts) in &self.paths {
            let mut d = String::new();
            for (i, q) in pts.iter().enumerate() {
                let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, num(q.x), num(-q.y));
            }
            let _ = writeln!(
                out,
                r#"  <path d="{d}" fill="none" {} stroke-linejoin="round"/>"#,
                style.attributes(stroke)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}
