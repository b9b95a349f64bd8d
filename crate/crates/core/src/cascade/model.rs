use std::fmt::Write as _;

use crate::{Error, Result};

/// One rectangle of a Haar-like feature, in base-window pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarFeature {
    rects: Vec<WeightedRect>,
}

impl HaarFeature {
    /// Two or three rects, all inside a `window_w × window_h` window.
    pub fn new(rects: Vec<WeightedRect>, window_w: u32, window_h: u32) -> Result<Self> {
        if !(2..=3).contains(&rects.len()) {
            return Err(Error::param("rects", format!("expected 2 or 3 rects, got {}", rects.len())));
        }
        for r in &rects {
            if r.w == 0 || r.h == 0 || r.x + r.w > window_w || r.y + r.h > window_h {
                return Err(Error::param(
                    "rects",
                    format!("rect {} {} {} {} lies outside the {window_w}x{window_h} window", r.x, r.y, r.w, r.h),
                ));
            }
        }
        Ok(HaarFeature { rects })
    }

    pub fn rects(&self) -> &[WeightedRect] {
        &self.rects
    }
}

/// Single-split decision tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Stump {
    pub feature: HaarFeature,
    pub threshold: f64,
    pub left_value: f64,
    pub right_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    stumps: Vec<Stump>,
    threshold: f64,
}

impl Stage {
    pub fn new(stumps: Vec<Stump>, threshold: f64) -> Result<Self> {
        if stumps.is_empty() {
            return Err(Error::param("stumps", "a stage needs at least one stump"));
        }
        Ok(Stage { stumps, threshold })
    }

    pub fn stumps(&self) -> &[Stump] {
        &self.stumps
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeModel {
    window_w: u32,
    window_h: u32,
    stages: Vec<Stage>,
}

impl CascadeModel {
    pub fn new(window_w: u32, window_h: u32, stages: Vec<Stage>) -> Result<Self> {
        if window_w < 4 || window_h < 4 {
            return Err(Error::param("window", format!("{window_w}x{window_h} is below 4x4")));
        }
        if stages.is_empty() {
            return Err(Error::param("stages", "a cascade needs at least one stage"));
        }
        Ok(CascadeModel {
            window_w,
            window_h,
            stages,
        })
    }

    pub fn window_w(&self) -> u32 {
        self.window_w
    }

    pub fn window_h(&self) -> u32 {
        self.window_h
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stump_count(&self) -> usize {
        self.stages.iter().map(|s| s.stumps.len()).sum()
    }

    /// Serializes back to the legacy markup [`parse_cascade`] reads.
    pub fn to_hcx(&self) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\"?>\n<opencv_storage>\n");
        s.push_str("<cascade type_id=\"opencv-haar-classifier\">\n");
        let _ = writeln!(s, "  <size>{} {}</size>", self.window_w, self.window_h);
        s.push_str("  <stages>\n");
        for (si, stage) in self.stages.iter().enumerate() {
            s.push_str("    <_>\n      <trees>\n");
            for stump in &stage.stumps {
                s.push_str("        <_>\n          <_>\n            <feature>\n              <rects>\n");
                for r in stump.feature.rects() {
                    let _ = writeln!(s, "                <_>{} {} {} {} {:?}</_>", r.x, r.y, r.w, r.h, r.weight);
                }
                s.push_str("              </rects>\n              <tilted>0</tilted>\n            </feature>\n");
                let _ = writeln!(s, "            <threshold>{:?}</threshold>", stump.threshold);
                let _ = writeln!(s, "            <left_val>{:?}</left_val>", stump.left_value);
                let _ = writeln!(s, "            <right_val>{:?}</right_val>", stump.right_value);
                s.push_str("          </_>\n        </_>\n");
            }
            s.push_str("      </trees>\n");
            let _ = writeln!(s, "      <stage_threshold>{:?}</stage_threshold>", stage.threshold);
            let _ = writeln!(s, "      <parent>{}</parent>\n      <next>-1</next>", si as i64 - 1);
            s.push_str("    </_>\n");
        }
        s.push_str("  </stages>\n</cascade>\n</opencv_storage>\n");
        s
    }
}

type Node<'a, 'i> = roxmltree::Node<'a, 'i>;

fn cascade_err(path: &str, reason: impl Into<String>) -> Error {
    Error::Cascade {
        path: path.to_string(),
        reason: reason.into(),
    }
}

fn elements<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(|n| n.is_element())
}

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str, path: &str) -> Result<Node<'a, 'i>> {
    elements(node)
        .find(|n| n.has_tag_name(name))
        .ok_or_else(|| cascade_err(path, format!("missing <{name}>")))
}

fn number<T: std::str::FromStr>(node: Node, path: &str) -> Result<T> {
    let text = node.text().unwrap_or("").trim();
    text.parse()
        .map_err(|_| cascade_err(path, format!("`{text}` is not a number")))
}

/// Parses the legacy `opencv-haar-classifier` markup: a root element with
/// `<size>W H</size>` and `<stages>`, each stage holding `<trees>` of
/// single-node trees and a `<stage_threshold>`.
pub fn parse_cascade(text: &str) -> Result<CascadeModel> {
    let doc = roxmltree::Document::parse(text).map_err(|e| cascade_err("/", e.to_string()))?;
    let mut root = doc.root_element();
    if root.has_tag_name("opencv_storage") {
        root = elements(root)
            .next()
            .ok_or_else(|| cascade_err("opencv_storage", "no cascade element"))?;
    }
    let root_path = root.tag_name().name().to_string();

    let size_path = format!("{root_path}/size");
    let size = elements(root)
        .find(|n| n.has_tag_name("size"))
        .ok_or_else(|| cascade_err(&size_path, "missing window size"))?;
    let dims: Vec<u32> = size
        .text()
        .unwrap_or("")
        .split_whitespace()
        .map(|t| t.parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| cascade_err(&size_path, "window size must be two integers"))?;
    let [window_w, window_h] = dims[..] else {
        return Err(cascade_err(&size_path, "window size must be two integers"));
    };

    let stages_path = format!("{root_path}/stages");
    let stages_node = child(root, "stages", &root_path)?;
    let mut stages = Vec::new();
    for (si, stage_node) in elements(stages_node).enumerate() {
        let sp = format!("{stages_path}/_[{si}]");
        let trees = child(stage_node, "trees", &sp)?;
        let mut stumps = Vec::new();
        for (ti, tree) in elements(trees).enumerate() {
            let tp = format!("{sp}/trees/_[{ti}]");
            let nodes: Vec<Node> = elements(tree).collect();
            if nodes.len() != 1 {
                return Err(cascade_err(&tp, format!("tree has {} nodes, only stumps are supported", nodes.len())));
            }
            stumps.push(parse_stump(nodes[0], &format!("{tp}/_[0]"), window_w, window_h)?);
        }
        let threshold = number(
            child(stage_node, "stage_threshold", &sp)?,
            &format!("{sp}/stage_threshold"),
        )?;
        stages.push(Stage::new(stumps, threshold).map_err(|e| cascade_err(&sp, e.to_string()))?);
    }
    CascadeModel::new(window_w, window_h, stages).map_err(|e| cascade_err(&root_path, e.to_string()))
}

fn parse_stump(node: Node, path: &str, window_w: u32, window_h: u32) -> Result<Stump> {
    if elements(node).any(|n| n.has_tag_name("left_node") || n.has_tag_name("right_node")) {
        return Err(cascade_err(path, "tree with more than one node"));
    }
    let fpath = format!("{path}/feature");
    let feature = child(node, "feature", path)?;
    if let Some(t) = elements(feature).find(|n| n.has_tag_name("tilted")) {
        if number::<i32>(t, &format!("{fpath}/tilted"))? != 0 {
            return Err(cascade_err(&fpath, "tilted features are not supported"));
        }
    }
    let rects_node = child(feature, "rects", &fpath)?;
    let mut rects = Vec::new();
    for (ri, r) in elements(rects_node).enumerate() {
        let rp = format!("{fpath}/rects/_[{ri}]");
        let fields: Vec<&str> = r.text().unwrap_or("").split_whitespace().collect();
        if fields.len() != 5 {
            return Err(cascade_err(&rp, "expected `x y w h weight`"));
        }
        let int = |s: &str| s.parse::<u32>().map_err(|_| cascade_err(&rp, format!("`{s}` is not a pixel coordinate")));
        let rect = WeightedRect {
            x: int(fields[0])?,
            y: int(fields[1])?,
            w: int(fields[2])?,
            h: int(fields[3])?,
            weight: fields[4]
                .parse()
                .map_err(|_| cascade_err(&rp, format!("`{}` is not a weight", fields[4])))?,
        };
        if rect.w == 0 || rect.h == 0 || rect.x + rect.w > window_w || rect.y + rect.h > window_h {
            return Err(cascade_err(&rp, format!("rect extends outside the {window_w}x{window_h} window")));
        }
        rects.push(rect);
    }
    let feature = HaarFeature::new(rects, window_w, window_h).map_err(|e| cascade_err(&fpath, e.to_string()))?;
    Ok(Stump {
        feature,
        threshold: number(child(node, "threshold", path)?, &format!("{path}/threshold"))?,
        left_value: number(child(node, "left_val", path)?, &format!("{path}/left_val"))?,
        right_value: number(child(node, "right_val", path)?, &format!("{path}/right_val"))?,
    })
}
