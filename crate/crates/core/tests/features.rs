use std::collections::HashSet;

use sketchlab_core::eval::evaluate;
use sketchlab_core::features::{features_of, find, Axis, FeatureKind, Geometry};
use sketchlab_core::little::parse;

const FIG1: &str = include_str!("golden/fig1.little");

fn fig1() -> sketchlab_core::eval::Canvas {
    evaluate(&parse(FIG1).unwrap()).unwrap()
}

#[test]
fn rect_center_is_derived_mean_of_bounds() {
    let fs = features_of(&fig1());
    let cx = find(&fs, "rect1/boxCX").unwrap();
    assert_eq!(cx.kind, FeatureKind::Derived);
    assert_eq!(cx.value(), (31.0 + 216.0) / 2.0);
    assert_eq!(cx.axis(), Axis::X);
}

#[test]
fn line_endpoints_are_primitive() {
    let fs = features_of(&fig1());
    let x1 = find(&fs, "line2/x1").unwrap();
    let y1 = find(&fs, "line2/y1").unwrap();
    assert_eq!((x1.kind, x1.value()), (FeatureKind::Primitive, 81.0));
    assert_eq!((y1.kind, y1.value()), (FeatureKind::Primitive, 76.0));
}

#[test]
fn empty_canvas_has_no_features() {
    let c = evaluate(&parse("(blobs [])").unwrap()).unwrap();
    assert!(features_of(&c).is_empty());
}

#[test]
fn widget_geometry() {
    let fs = features_of(&fig1());
    assert_eq!(find(&fs, "rect1/boxC").unwrap().geometry(), Some(Geometry::Crosshair { x: 123.5, y: 184.5 }));
    assert_eq!(
        find(&fs, "rect1/width").unwrap().geometry(),
        Some(Geometry::Segment { x1: 31.0, y1: 184.5, x2: 216.0, y2: 184.5 })
    );
    match find(&fs, "rect1/color").unwrap().geometry() {
        Some(Geometry::SliderZone { bot, .. }) => assert!(bot <= 100.0),
        g => panic!("{g:?}"),
    }
}

#[test]
fn rect_overlay_counts() {
    let fs = features_of(&fig1());
    let rect: Vec<_> = fs.iter().filter(|f| f.shape == "rect1").collect();
    let count = |p: fn(&Geometry) -> bool| rect.iter().filter(|f| f.geometry().as_ref().is_some_and(p)).count();
    assert_eq!(count(|g| matches!(g, Geometry::Crosshair { .. })), 9);
    assert_eq!(count(|g| matches!(g, Geometry::Segment { .. })), 2);
    assert_eq!(count(|g| matches!(g, Geometry::SliderZone { .. })), 1);
}

const MIXED: &str = "(def poly (stretchyPolygon [10 20 110 220] 30 'none' 2 [[0 1] [0.5 0] [1 0.7]]))
(def oval1 [ (oval 100 'black' 1 [5 6 50 60]) ])
(def grp [ (group [0 0 300 300] [ (line 1 2 3 4 5 6) (line 1 2 3 4 5 7) ]) ])
(blobs [ poly oval1 grp [ (line 9 9 1 1 2 2) ] ])";

#[test]
fn values_match_folded_equations_and_ids_are_unique() {
    for src in [FIG1, MIXED] {
        let c = evaluate(&parse(src).unwrap()).unwrap();
        let fs = features_of(&c);
        let mut ids = HashSet::new();
        for f in &fs {
            assert!(ids.insert(f.id()), "duplicate {}", f.id());
            for p in &f.parts {
                for t in [&p.trace, &p.display] {
                    let v = t.eval(&|l| c.value_of(l)).unwrap();
                    assert!((v - p.value).abs() <= 1e-9 * v.abs().max(1.0), "{} {t}", f.id());
                }
            }
        }
    }
}

#[test]
fn every_numeric_attribute_is_one_primitive() {
    let c = evaluate(&parse(MIXED).unwrap()).unwrap();
    let fs = features_of(&c);
    for (path, n) in c.all_nodes() {
        for attr in n.scalar_names() {
            let hits = fs
                .iter()
                .filter(|f| f.kind == FeatureKind::Primitive && f.node_path == path && f.name == attr)
                .count();
            assert_eq!(hits, 1, "{path:?} {attr}");
        }
    }
    let prims = fs.iter().filter(|f| f.kind == FeatureKind::Primitive).count();
    let attrs: usize = c.all_nodes().iter().map(|(_, n)| n.scalar_names().len()).sum();
    assert_eq!(prims, attrs);
}

#[test]
fn shape_names_follow_blobs() {
    let c = evaluate(&parse(MIXED).unwrap()).unwrap();
    let fs = features_of(&c);
    for id in ["poly/left", "poly/point:2:x", "poly/color", "oval1/rx", "oval1/boxC", "grp/left", "grp_2/x1", "grp_3/x1", "blob3/p2"] {
        assert!(find(&fs, id).is_some(), "{id}");
    }
    assert_eq!(find(&fs, "poly/point:2").unwrap().geometry(), Some(Geometry::Crosshair { x: 60.0, y: 20.0 }));
    assert_eq!(find(&fs, "oval1/rx").unwrap().value(), 22.5);
}

#[test]
fn features_serialize_with_ids() {
    let fs = features_of(&fig1());
    let v = serde_json::to_value(find(&fs, "rect1/boxC").unwrap()).unwrap();
    assert_eq!(v["id"], "rect1/boxC");
    assert_eq!(v["axis"], "Point");
    assert_eq!(v["geometry"]["type"], "crosshair");
}
