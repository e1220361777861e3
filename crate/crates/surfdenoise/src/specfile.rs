//! Filter specifications as flat `key = value` text blocks.
//!
//! ```text
//! method = zheng-bilateral
//! sigma = 0.55
//! sigma_d = auto
//! neighborhood = shared-vertex
//! iterations = 20
//! ```
//!
//! Missing keys keep the method preset; `#` starts a comment. Angles are
//! written in radians except `guidance_threshold_deg`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use surfdenoise_core::filter::{FilterArgument, FilterSpec, MeshMethod, SpatialSigma, SpatialWeight};
use surfdenoise_core::mesh::{NeighborhoodMode, NeighborhoodSpec};
use surfdenoise_core::point_filter::{PointFilterSpec, PointMethod, PointNeighborhood, PointSigma};
use surfdenoise_core::{Kernel, KernelKind};

use crate::error::{Error, Result};

/// A parsed block: either kind of filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnySpec {
    Mesh(FilterSpec),
    Point(PointFilterSpec),
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Entries> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::parse(n + 1, format!("expected `key = value`, got `{line}`")));
            };
            let key = k.trim().to_string();
            if map.insert(key.clone(), (n + 1, v.trim().to_string())).is_some() {
                return Err(Error::parse(n + 1, format!("duplicate key `{key}`")));
            }
        }
        Ok(Entries { map })
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn real(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key)
            .map(|(n, v)| {
                v.parse::<f64>()
                    .map_err(|_| Error::parse(n, format!("`{key}`: bad number `{v}`")))
            })
            .transpose()
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>> {
        self.take(key)
            .map(|(n, v)| {
                v.parse::<usize>()
                    .map_err(|_| Error::parse(n, format!("`{key}`: bad integer `{v}`")))
            })
            .transpose()
    }

    fn flag(&mut self, key: &str) -> Result<Option<bool>> {
        self.take(key)
            .map(|(n, v)| match v.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(Error::parse(n, format!("`{key}`: expected true or false, got `{v}`"))),
            })
            .transpose()
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().next() {
            Some((k, (n, _))) => Err(Error::parse(n, format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}

fn sigma_text(s: SpatialSigma) -> String {
    match s {
        SpatialSigma::Auto => "auto".into(),
        SpatialSigma::AutoGlobal => "auto-global".into(),
        SpatialSigma::Fixed(v) => format!("{v}"),
    }
}

fn point_sigma_text(s: PointSigma) -> String {
    match s {
        PointSigma::Auto => "auto".into(),
        PointSigma::Fixed(v) => format!("{v}"),
    }
}

/// Text block of a mesh filter spec; parses back to the same spec.
pub fn mesh_spec_to_text(spec: &FilterSpec) -> String {
    let mut s = String::new();
    let k = &spec.range_kernel;
    let _ = writeln!(s, "method = {}", spec.method.name());
    let _ = writeln!(s, "kernel = {}", k.kind().name());
    let _ = writeln!(s, "sigma = {}", k.sigma());
    if k.kind() == KernelKind::Box {
        let _ = writeln!(s, "box_floor = {}", k.box_floor());
    }
    let _ = writeln!(s, "argument = {}", spec.argument.name());
    let _ = writeln!(s, "spatial = {}", spec.spatial.name());
    let _ = writeln!(s, "sigma_d = {}", sigma_text(spec.spatial_sigma));
    match spec.neighborhood.mode {
        NeighborhoodMode::SharedVertexRing => {
            let _ = writeln!(s, "neighborhood = shared-vertex");
        }
        NeighborhoodMode::SharedEdgeRing => {
            let _ = writeln!(s, "neighborhood = shared-edge");
        }
        NeighborhoodMode::CentroidRadius(r) => {
            let _ = writeln!(s, "neighborhood = radius");
            let _ = writeln!(s, "radius = {r}");
        }
    }
    let _ = writeln!(s, "include_self = {}", spec.neighborhood.include_self);
    let _ = writeln!(s, "iterations = {}", spec.iterations);
    let _ = writeln!(s, "lambda = {}", spec.step_lambda);
    let _ = writeln!(s, "guidance_threshold_deg = {}", spec.guidance_threshold.to_degrees());
    s
}

pub fn point_spec_to_text(spec: &PointFilterSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "method = {}", spec.method.name());
    let _ = writeln!(s, "sigma = {}", point_sigma_text(spec.sigma));
    let _ = writeln!(s, "sigma_d = {}", point_sigma_text(spec.sigma_d));
    match spec.neighborhood {
        PointNeighborhood::Knn(k) => {
            let _ = writeln!(s, "neighborhood = knn");
            let _ = writeln!(s, "k = {k}");
        }
        PointNeighborhood::Radius(r) => {
            let _ = writeln!(s, "neighborhood = radius");
            let _ = writeln!(s, "radius = {r}");
        }
    }
    let _ = writeln!(s, "iterations = {}", spec.iterations);
    s
}

/// Parses a block; the `method` key decides between mesh and point specs.
pub fn parse_spec(text: &str) -> Result<AnySpec> {
    let mut e = Entries::parse(text)?;
    let Some((line, name)) = e.take("method") else {
        return Err(Error::Invalid("spec without `method`".into()));
    };
    if let Some(m) = MeshMethod::from_name(&name) {
        mesh_from_entries(m, e).map(AnySpec::Mesh)
    } else if let Some(m) = PointMethod::from_name(&name) {
        point_from_entries(m, e).map(AnySpec::Point)
    } else {
        Err(Error::parse(line, format!("unknown method `{name}`")))
    }
}

fn mesh_from_entries(method: MeshMethod, mut e: Entries) -> Result<FilterSpec> {
    let sigma = e.real("sigma")?.unwrap_or(method.default_sigma());
    let mut spec = FilterSpec::preset(method, sigma)?;
    let kind = match e.take("kernel") {
        Some((n, v)) => KernelKind::from_name(&v).ok_or_else(|| Error::parse(n, format!("unknown kernel `{v}`")))?,
        None => spec.range_kernel.kind(),
    };
    let floor = e.real("box_floor")?;
    spec.range_kernel = match floor {
        Some(f) => Kernel::boxed(sigma, f)?,
        None if kind == spec.range_kernel.kind() => spec.range_kernel.with_sigma(sigma)?,
        None => Kernel::new(kind, sigma)?,
    };
    if let Some((n, v)) = e.take("argument") {
        spec.argument =
            FilterArgument::from_name(&v).ok_or_else(|| Error::parse(n, format!("unknown argument `{v}`")))?;
    }
    if let Some((n, v)) = e.take("spatial") {
        spec.spatial =
            SpatialWeight::from_name(&v).ok_or_else(|| Error::parse(n, format!("unknown spatial weight `{v}`")))?;
    }
    if let Some((n, v)) = e.take("sigma_d") {
        spec.spatial_sigma = match v.as_str() {
            "auto" => SpatialSigma::Auto,
            "auto-global" => SpatialSigma::AutoGlobal,
            _ => SpatialSigma::Fixed(v.parse().map_err(|_| Error::parse(n, format!("bad sigma_d `{v}`")))?),
        };
    }
    let radius = e.real("radius")?;
    let mut mode = spec.neighborhood.mode;
    if let Some((n, v)) = e.take("neighborhood") {
        mode = match v.as_str() {
            "shared-vertex" => NeighborhoodMode::SharedVertexRing,
            "shared-edge" => NeighborhoodMode::SharedEdgeRing,
            "radius" => NeighborhoodMode::CentroidRadius(
                radius.ok_or_else(|| Error::parse(n, "neighborhood = radius needs a `radius` key"))?,
            ),
            _ => return Err(Error::parse(n, format!("unknown neighborhood `{v}`"))),
        };
    }
    let include_self = e.flag("include_self")?.unwrap_or(spec.neighborhood.include_self);
    spec.neighborhood = NeighborhoodSpec::new(mode, include_self);
    if let Some(i) = e.count("iterations")? {
        spec.iterations = i;
    }
    if let Some(l) = e.real("lambda")? {
        spec.step_lambda = l;
    }
    if let Some(t) = e.real("guidance_threshold_deg")? {
        spec.guidance_threshold = t.to_radians();
    }
    e.finish()?;
    spec.validate()?;
    Ok(spec)
}

fn point_from_entries(method: PointMethod, mut e: Entries) -> Result<PointFilterSpec> {
    let mut spec = PointFilterSpec::preset(method);
    let sigma = |e: &mut Entries, key: &str| -> Result<Option<PointSigma>> {
        e.take(key)
            .map(|(n, v)| match v.as_str() {
                "auto" => Ok(PointSigma::Auto),
                _ => v
                    .parse()
                    .map(PointSigma::Fixed)
                    .map_err(|_| Error::parse(n, format!("bad {key} `{v}`"))),
            })
            .transpose()
    };
    if let Some(s) = sigma(&mut e, "sigma")? {
        spec.sigma = s;
    }
    if let Some(s) = sigma(&mut e, "sigma_d")? {
        spec.sigma_d = s;
    }
    let k = e.count("k")?;
    let radius = e.real("radius")?;
    spec.neighborhood = match e.take("neighborhood") {
        Some((n, v)) => match v.as_str() {
            "knn" => PointNeighborhood::Knn(k.unwrap_or(10)),
            "radius" => PointNeighborhood::Radius(
                radius.ok_or_else(|| Error::parse(n, "neighborhood = radius needs a `radius` key"))?,
            ),
            _ => return Err(Error::parse(n, format!("unknown neighborhood `{v}`"))),
        },
        None => match (k, radius) {
            (_, Some(r)) => PointNeighborhood::Radius(r),
            (Some(k), None) => PointNeighborhood::Knn(k),
            (None, None) => spec.neighborhood,
        },
    };
    if let Some(i) = e.count("iterations")? {
        spec.iterations = i;
    }
    e.finish()?;
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_round_trips() {
        for m in MeshMethod::ALL {
            let spec = FilterSpec::preset(m, m.default_sigma()).unwrap();
            assert_eq!(
                parse_spec(&mesh_spec_to_text(&spec)).unwrap(),
                AnySpec::Mesh(spec),
                "{}",
                m.name()
            );
        }
        for m in PointMethod::ALL {
            let spec = PointFilterSpec::preset(m);
            assert_eq!(parse_spec(&point_spec_to_text(&spec)).unwrap(), AnySpec::Point(spec));
        }
    }

    #[test]
    fn overrides_and_defaults() {
        let text = "# zheng\nmethod = zheng-bilateral\nsigma = 0.3\nneighborhood = radius\nradius = 0.2\n\
                    include_self = false\nsigma_d = auto-global\n";
        let AnySpec::Mesh(s) = parse_spec(text).unwrap() else {
            panic!()
        };
        assert_eq!(s.range_kernel.sigma(), 0.3);
        assert_eq!(
            s.neighborhood,
            NeighborhoodSpec::new(NeighborhoodMode::CentroidRadius(0.2), false)
        );
        assert_eq!(s.spatial_sigma, SpatialSigma::AutoGlobal);
        assert_eq!(s.iterations, 20);

        let AnySpec::Point(p) = parse_spec("method = zheng-rolling\nk = 6\n").unwrap() else {
            panic!()
        };
        assert_eq!(p.neighborhood, PointNeighborhood::Knn(6));
    }

    #[test]
    fn rejects_bad_blocks() {
        assert!(parse_spec("sigma = 1\n").is_err());
        assert!(matches!(
            parse_spec("method = zheng-bilateral\ncolour = red\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_spec("method = zheng-bilateral\nsigma = 1\nsigma = 2\n").is_err());
        assert!(parse_spec("method = yagou-mean\nkernel = tukey\n").is_err());
        assert!(parse_spec("method = nope\n").is_err());
        assert!(parse_spec("method = li-bilateral\nneighborhood = radius\n").is_err());
    }
}
