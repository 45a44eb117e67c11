use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    Sphere,
    /// Upper hemisphere; the incomplete variant is the open hemisphere.
    Hemisphere,
    Hyperbolic,
    Cone,
    Euclidean,
    /// Unit disk; the incomplete variant is punctured at the center.
    Disk,
    /// Three unit edges glued at a hub.
    Tripod,
    Graph,
}

impl SpaceKind {
    fn name(self) -> &'static str {
        match self {
            SpaceKind::Sphere => "sphere",
            SpaceKind::Hemisphere => "hemisphere",
            SpaceKind::Hyperbolic => "hyperbolic",
            SpaceKind::Cone => "cone",
            SpaceKind::Euclidean => "euclidean",
            SpaceKind::Disk => "disk",
            SpaceKind::Tripod => "tripod",
            SpaceKind::Graph => "graph",
        }
    }

    /// Whether the kind has an incomplete variant with a known completion.
    pub fn has_incomplete_variant(self) -> bool {
        matches!(
            self,
            SpaceKind::Hemisphere | SpaceKind::Cone | SpaceKind::Disk
        )
    }
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sphere" => SpaceKind::Sphere,
            "hemisphere" => SpaceKind::Hemisphere,
            "hyperbolic" | "hyperbolic-plane" => SpaceKind::Hyperbolic,
            "cone" => SpaceKind::Cone,
            "euclidean" | "plane" => SpaceKind::Euclidean,
            "disk" => SpaceKind::Disk,
            "tripod" => SpaceKind::Tripod,
            "graph" => SpaceKind::Graph,
            other => return Err(Error::Parse(format!("unknown space type `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Complete,
    Incomplete,
}

/// Everything needed to regenerate a sample.
///
/// The string form is `type[:item,item,...]` where items are `key=value`
/// pairs or flags, e.g. `sphere:r=1,n=20,seed=7`,
/// `hemisphere:open,n=40,seed=3` or `cone:angle=3pi/2,n=30,seed=1,incomplete`.
/// Angles accept `pi` multiples such as `5pi/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(rename = "type")]
    pub kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_list: Option<Vec<(String, String, f64)>>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub variant: Variant,
    /// Include the fixed anchor configuration of the kind before random points.
    #[serde(default)]
    pub anchors: bool,
    /// Sampling extent (radius of the sampled region) for unbounded kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
    /// Subdivision step along graph edges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

fn default_n() -> usize {
    20
}

impl SpaceSpec {
    pub fn new(kind: SpaceKind) -> Self {
        SpaceSpec {
            kind,
            radius: None,
            total_angle: None,
            edge_list: None,
            n: default_n(),
            seed: 0,
            variant: Variant::Complete,
            anchors: false,
            extent: None,
            step: None,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.radius = Some(r);
        self
    }

    pub fn with_total_angle(mut self, a: f64) -> Self {
        self.total_angle = Some(a);
        self
    }

    pub fn with_extent(mut self, e: f64) -> Self {
        self.extent = Some(e);
        self
    }

    pub fn with_step(mut self, s: f64) -> Self {
        self.step = Some(s);
        self
    }

    pub fn with_variant(mut self, v: Variant) -> Self {
        self.variant = v;
        self
    }

    pub fn with_anchors(mut self) -> Self {
        self.anchors = true;
        self
    }

    /// Parses either the compact string form or a JSON document.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('{') {
            serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))
        } else {
            t.parse()
        }
    }
}

/// Parses a length or angle, accepting forms like `2`, `0.5`, `pi`, `3pi/2`.
pub(crate) fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a number: `{s}`"));
    if let Some(pos) = s.find("pi") {
        let coef = &s[..pos];
        let rest = &s[pos + 2..];
        let c = match coef.trim_end_matches('*') {
            "" => 1.0,
            "-" => -1.0,
            x => x.parse::<f64>().map_err(|_| bad())?,
        };
        let div = match rest {
            "" => 1.0,
            r => r
                .strip_prefix('/')
                .ok_or_else(bad)?
                .parse::<f64>()
                .map_err(|_| bad())?,
        };
        return Ok(c * std::f64::consts::PI / div);
    }
    s.parse::<f64>().map_err(|_| bad())
}

fn parse_edges(s: &str) -> Result<Vec<(String, String, f64)>> {
    // a-b:1;b-c:2.5
    s.split(';')
        .filter(|e| !e.is_empty())
        .map(|e| {
            let (ends, len) = e
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("edge `{e}` needs `a-b:length`")))?;
            let (a, b) = ends
                .split_once('-')
                .ok_or_else(|| Error::Parse(format!("edge `{e}` needs `a-b:length`")))?;
            Ok((a.to_string(), b.to_string(), parse_real(len)?))
        })
        .collect()
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k, r),
            None => (s, ""),
        };
        let mut spec = SpaceSpec::new(kind.trim().parse()?);
        for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            match item.split_once('=') {
                Some((key, value)) => match key {
                    "r" | "radius" => spec.radius = Some(parse_real(value)?),
                    "n" => {
                        spec.n = value
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad n `{value}`")))?
                    }
                    "seed" => {
                        spec.seed = value
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad seed `{value}`")))?
                    }
                    "angle" | "total_angle" | "total-angle" => {
                        spec.total_angle = Some(parse_real(value)?)
                    }
                    "extent" => spec.extent = Some(parse_real(value)?),
                    "step" => spec.step = Some(parse_real(value)?),
                    "edges" => spec.edge_list = Some(parse_edges(value)?),
                    "variant" => spec.variant = parse_variant(value)?,
                    other => return Err(Error::Parse(format!("unknown key `{other}`"))),
                },
                None => match item {
                    "anchors" => spec.anchors = true,
                    flag => spec.variant = parse_variant(flag)?,
                },
            }
        }
        Ok(spec)
    }
}

fn parse_variant(s: &str) -> Result<Variant> {
    match s {
        "complete" | "closed" => Ok(Variant::Complete),
        "incomplete" | "open" | "punctured" | "minus-apex" => Ok(Variant::Incomplete),
        other => Err(Error::Parse(format!("unknown flag `{other}`"))),
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.kind.name())?;
        let mut items = Vec::new();
        if self.variant == Variant::Incomplete {
            items.push("incomplete".to_string());
        }
        if let Some(r) = self.radius {
            items.push(format!("r={r}"));
        }
        if let Some(a) = self.total_angle {
            items.push(format!("angle={a}"));
        }
        if let Some(e) = self.extent {
            items.push(format!("extent={e}"));
        }
        if let Some(s) = self.step {
            items.push(format!("step={s}"));
        }
        if let Some(edges) = &self.edge_list {
            let e: Vec<String> = edges
                .iter()
                .map(|(a, b, l)| format!("{a}-{b}:{l}"))
                .collect();
            items.push(format!("edges={}", e.join(";")));
        }
        if self.anchors {
            items.push("anchors".to_string());
        }
        items.push(format!("n={}", self.n));
        items.push(format!("seed={}", self.seed));
        write!(f, "{}", items.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_compact_forms() {
        let s: SpaceSpec = "sphere:r=1,n=20,seed=7".parse().unwrap();
        assert_eq!(s.kind, SpaceKind::Sphere);
        assert_eq!((s.radius, s.n, s.seed), (Some(1.0), 20, 7));

        let h: SpaceSpec = "hemisphere:open,r=1,n=40,seed=3".parse().unwrap();
        assert_eq!(h.variant, Variant::Incomplete);

        let c: SpaceSpec = "cone:angle=3pi/2,n=30,seed=1,incomplete".parse().unwrap();
        assert!((c.total_angle.unwrap() - 1.5 * PI).abs() < 1e-15);

        let g: SpaceSpec = "graph:edges=a-b:1;b-c:2".parse().unwrap();
        assert_eq!(g.edge_list.unwrap().len(), 2);
    }

    #[test]
    fn display_round_trips() {
        let s: SpaceSpec = "cone:angle=5pi/2,n=30,seed=1,incomplete,anchors"
            .parse()
            .unwrap();
        let again: SpaceSpec = s.to_string().parse().unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn parses_json_document() {
        let s = SpaceSpec::parse(r#"{"type":"sphere","radius":2.0,"n":10,"seed":4}"#).unwrap();
        assert_eq!((s.kind, s.radius, s.n), (SpaceKind::Sphere, Some(2.0), 10));
    }

    #[test]
    fn rejects_garbage() {
        assert!("moebius:n=3".parse::<SpaceSpec>().is_err());
        assert!("sphere:n=abc".parse::<SpaceSpec>().is_err());
        assert!("sphere:wobbly".parse::<SpaceSpec>().is_err());
        assert!(parse_real("3pie").is_err());
    }

    #[test]
    fn real_forms() {
        assert_eq!(parse_real("2").unwrap(), 2.0);
        assert!((parse_real("pi").unwrap() - PI).abs() < 1e-15);
        assert!((parse_real("5pi/2").unwrap() - 2.5 * PI).abs() < 1e-15);
        assert!((parse_real("0.5*pi").unwrap() - 0.5 * PI).abs() < 1e-15);
    }
}
