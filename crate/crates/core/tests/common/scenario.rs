//! Scripted constructions used by the scenario and acceptance suites.

use sketchlab_core::draw::{draw_shape, DrawRequest, Tool};
use sketchlab_core::eval::evaluate;
use sketchlab_core::features::{features_of, find};
use sketchlab_core::little::{Expr, Program};
use sketchlab_core::relate::make_equal;

fn draw(p: &Program, tool: Tool, pts: &[[f64; 2]], seed: u64) -> Program {
    draw_shape(p, &DrawRequest { tool, geometry: pts.to_vec(), color_seed: seed }).unwrap()
}

/// The logo as three roughly drawn triangles, four small spacer circles
/// and one large circle around everything.
pub fn logo_parts() -> Program {
    let mut p = sketchlab_core::little::parse("(blobs [])").unwrap();
    let triangles: [&[[f64; 2]]; 3] = [
        &[[70.0, 50.0], [250.0, 50.0], [250.0, 230.0]],
        &[[50.0, 70.0], [50.0, 232.0], [140.0, 160.0]],
        &[[68.0, 250.0], [232.0, 250.0], [150.0, 170.0]],
    ];
    for (i, t) in triangles.iter().enumerate() {
        p = draw(&p, Tool::Polygon, t, 10 + i as u64);
    }
    let circles = [
        [[48.0, 48.0], [69.0, 69.0]],
        [[231.0, 231.0], [252.0, 252.0]],
        [[49.0, 232.0], [68.0, 251.0]],
        [[141.0, 150.0], [160.0, 171.0]],
        [[45.0, 45.0], [255.0, 255.0]],
    ];
    for (i, c) in circles.iter().enumerate() {
        p = draw(&p, Tool::Oval, c, 20 + i as u64);
    }
    p
}

pub const HELPERS: &[&str] = &["oval4", "oval5", "oval6", "oval7", "oval8"];

/// Eighteen Make Equal steps: spacers, rectangular edges, the centered
/// middle circle, and the outer circle's box.
pub const LOGO_STEPS: &[(&str, &str)] = &[
    // Each corner of a triangle touches an adjacent spacer.
    ("polygon1/point:1:x", "oval4/right"),
    ("polygon2/point:1:y", "oval4/bot"),
    ("polygon1/point:3:y", "oval5/top"),
    ("polygon3/point:2:x", "oval5/left"),
    ("polygon2/point:2:y", "oval6/top"),
    ("polygon3/point:1:x", "oval6/right"),
    ("polygon2/point:3:x", "oval7/left"),
    ("polygon3/point:3:y", "oval7/bot"),
    // Outer edges line up with the corner spacers.
    ("oval4/left", "polygon2/left"),
    ("oval4/top", "polygon1/top"),
    ("oval5/right", "polygon1/right"),
    ("oval5/bot", "polygon3/bot"),
    // The middle spacer sits on the center lines.
    ("oval7/boxCX", "polygon3/boxCX"),
    ("oval7/boxCY", "polygon2/boxCY"),
    // The outer circle's box is the logo's box.
    ("oval8/left", "polygon2/left"),
    ("oval8/top", "polygon1/top"),
    ("oval8/right", "polygon1/right"),
    ("oval8/bot", "polygon3/bot"),
];

pub fn feature_value(p: &Program, id: &str) -> Option<f64> {
    let c = evaluate(p).ok()?;
    let fs = features_of(&c);
    Some(find(&fs, id)?.value())
}

/// Run the steps; the error names the failing step.
pub fn relate_all(p: &Program, steps: &[(&str, &str)]) -> Result<Program, String> {
    let mut p = p.clone();
    for (i, (a, b)) in steps.iter().enumerate() {
        let out = make_equal(&p, &[a.to_string(), b.to_string()]).map_err(|e| format!("step {}: {e}", i + 1))?;
        if !out.failed.is_empty() {
            return Err(format!("step {}: {:?} unsolved", i + 1, out.failed));
        }
        p = out.program;
    }
    Ok(p)
}

/// Largest pairwise gap among the given equalities.
pub fn worst_gap(p: &Program, steps: &[(&str, &str)]) -> f64 {
    steps
        .iter()
        .map(|(a, b)| match (feature_value(p, a), feature_value(p, b)) {
            (Some(x), Some(y)) => (x - y).abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// The hand edit that drops helper shapes: their defs and blobs entries go.
pub fn delete_shapes(p: &Program, names: &[&str]) -> Program {
    let mut q = p.clone();
    q.defs.retain(|d| !d.pat.as_var().is_some_and(|n| names.contains(&n)));
    if let Some(list) = q.blobs_mut() {
        list.retain(|e: &Expr| !e.as_var().is_some_and(|n| names.contains(&n)));
    }
    q.renumber();
    q
}
