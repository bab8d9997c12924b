//! Turns the string specs of a config into domains, maps and operators.

use std::sync::Arc;

use korovkin::bernstein::{
    kantorovich_family, max_kantorovich_family, sup_bernstein_family, tensor_sup_bernstein_family, CompositionMap,
    CompositionOperator,
};
use korovkin::choquet::{choquet_kantorovich_family, DistortionFunction};
use korovkin::domain::{GridDomain, NormKind};
use korovkin::function::Polynomial;
use korovkin::operators::{cesaro_family, FnOperator, OperatorFamily, OperatorInstance};
use korovkin::quadrature::Quadrature;
use korovkin::trig::{golden_angle, rotation_family, CircleMean};
use korovkin::RealFunction;

use crate::config::{AlphaSpec, Bounds, DomainTag, ExperimentConfig, NormTag};
use crate::error::CliError;

pub const FAMILY_TAGS: [&str; 5] = [
    "sup_bernstein",
    "kantorovich",
    "max_kantorovich",
    "choquet_kantorovich",
    "weyl",
];

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn domain(cfg: &ExperimentConfig) -> Result<GridDomain, CliError> {
    Ok(match (cfg.domain, &cfg.bounds) {
        (DomainTag::Interval, None) => GridDomain::unit_interval(cfg.grid)?,
        (DomainTag::Interval, Some(Bounds::Interval([lo, hi]))) => GridDomain::interval(*lo, *hi, cfg.grid)?,
        (DomainTag::Box, Some(Bounds::Box(b))) => {
            let bounds: Vec<(f64, f64)> = b.iter().map(|[lo, hi]| (*lo, *hi)).collect();
            GridDomain::boxed(&bounds, cfg.grid)?
        }
        (DomainTag::Circle, _) => GridDomain::circle(cfg.grid)?,
        _ => return Err(config_err("bounds do not match the domain kind")),
    })
}

/// `identity | poly:[c0, c1, ...] | expr:<source>`.
pub fn phi(spec: &str, domain: &GridDomain) -> Result<CompositionMap, CliError> {
    let spec = spec.trim();
    if spec == "identity" {
        return Ok(CompositionMap::identity());
    }
    let f = if let Some(list) = spec.strip_prefix("poly:") {
        let coeffs: Vec<f64> = toml::from_str::<toml::Table>(&format!("c = {list}"))
            .ok()
            .and_then(|t| t.get("c").cloned())
            .and_then(|v| v.try_into().ok())
            .ok_or_else(|| config_err(format!("bad polynomial coefficients {list:?}")))?;
        if coeffs.is_empty() {
            return Err(config_err("polynomial needs at least one coefficient"));
        }
        RealFunction::from(Polynomial::univariate(&coeffs))
    } else if let Some(src) = spec.strip_prefix("expr:") {
        RealFunction::parse(src)?
    } else {
        return Err(config_err(format!(
            "unknown phi {spec:?} (expected identity, poly:[...] or expr:<source>)"
        )));
    };
    Ok(CompositionMap::new(f, domain)?)
}

pub fn rotation_angle(alpha: &Option<AlphaSpec>) -> Result<f64, CliError> {
    match alpha {
        None => Ok(golden_angle()),
        Some(AlphaSpec::Value(v)) => Ok(*v),
        Some(AlphaSpec::Named(s)) if s == "golden" => Ok(golden_angle()),
        Some(AlphaSpec::Named(s)) => Err(config_err(format!("unknown rotation angle {s:?}"))),
    }
}

/// The deficit override for Korovkin runs (rotation families use `alpha`
/// for their angle instead).
pub fn deficit_override(cfg: &ExperimentConfig) -> Result<Option<f64>, CliError> {
    if family_uses_rotation(&cfg.family) {
        return Ok(None);
    }
    match &cfg.alpha {
        None => Ok(None),
        Some(AlphaSpec::Value(v)) => Ok(Some(*v)),
        Some(AlphaSpec::Named(s)) => Err(config_err(format!("alpha must be a number here, got {s:?}"))),
    }
}

fn family_uses_rotation(tag: &str) -> bool {
    tag.trim_start_matches("cesaro:") == "weyl"
}

pub fn norm(cfg: &ExperimentConfig, domain: &GridDomain) -> NormKind {
    match cfg.norm {
        NormTag::Sup => NormKind::Sup,
        NormTag::L1 => NormKind::l1_on(domain),
    }
}

pub fn family(
    tag: &str,
    cfg: &ExperimentConfig,
    domain: &GridDomain,
    phi_map: &CompositionMap,
) -> Result<OperatorFamily, CliError> {
    if let Some(inner) = tag.strip_prefix("cesaro:") {
        return Ok(cesaro_family(&family(inner, cfg, domain, phi_map)?));
    }
    let quad = Quadrature::Simpson {
        panels: cfg.quadrature_panels,
    };
    quad.validate()?;
    let phi = phi_map.clone();
    let d = domain.clone();
    Ok(match tag {
        "sup_bernstein" if domain.dimension() == 2 => tensor_sup_bernstein_family(phi, cfg.refinement, d),
        "sup_bernstein" => sup_bernstein_family(phi, cfg.refinement, d),
        "kantorovich" => kantorovich_family(phi, quad, d),
        "max_kantorovich" => max_kantorovich_family(phi, quad, d),
        "choquet_kantorovich" => {
            let g = DistortionFunction::from_spec(&cfg.distortion)?;
            choquet_kantorovich_family(phi, g, cfg.resolution, d)
        }
        "weyl" => {
            let max_n = *cfg.schedule.last().expect("validated schedule");
            rotation_family(rotation_angle(&cfg.alpha)?, max_n, d)?
        }
        other => {
            return Err(config_err(format!(
                "unknown family {other:?} (expected one of {FAMILY_TAGS:?} or cesaro:<family>)"
            )))
        }
    })
}

/// `identity | composition | circle_mean | expr:<source>`; the last is
/// composition with the given map.
pub fn limit(spec: &str, domain: &GridDomain, phi_map: &CompositionMap) -> Result<OperatorInstance, CliError> {
    Ok(match spec.trim() {
        "identity" => Arc::new(FnOperator::identity(domain.clone())),
        "composition" => Arc::new(CompositionOperator::new(phi_map.clone(), domain.clone())?),
        "circle_mean" => Arc::new(CircleMean::new(domain.clone())?),
        s => match s.strip_prefix("expr:") {
            Some(src) => {
                let psi = CompositionMap::new(RealFunction::parse(src)?, domain)?;
                Arc::new(CompositionOperator::new(psi, domain.clone())?)
            }
            None => {
                return Err(config_err(format!(
                    "unknown limit {s:?} (expected identity, composition, circle_mean or expr:<source>)"
                )))
            }
        },
    })
}

pub fn probes(cfg: &ExperimentConfig, domain: &GridDomain) -> Result<Vec<RealFunction>, CliError> {
    cfg.probes
        .iter()
        .map(|src| {
            let f = RealFunction::parse(src)?;
            f.sample(domain)?;
            Ok(f)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml(&format!("domain = \"interval\"\ngrid = 11\nschedule = [1, 2]\n{extra}")).unwrap()
    }

    #[test]
    fn phi_specs() {
        let d = GridDomain::unit_interval(11).unwrap();
        assert_eq!(phi("identity", &d).unwrap().eval(0.3), 0.3);
        assert_eq!(phi("poly:[0, 0, 1]", &d).unwrap().eval(0.5), 0.25);
        assert!((phi("expr:sqrt(x)", &d).unwrap().eval(0.25) - 0.5).abs() < 1e-15);
        assert!(matches!(phi("poly:[a]", &d), Err(CliError::Config(_))));
        assert!(matches!(
            phi("poly:[0, 2]", &d),
            Err(CliError::Core(korovkin::Error::Domain(_)))
        ));
        assert!(matches!(phi("cubic", &d), Err(CliError::Config(_))));
    }

    #[test]
    fn families_and_limits() {
        let c = cfg("");
        let d = domain(&c).unwrap();
        let p = CompositionMap::identity();
        for tag in [
            "sup_bernstein",
            "kantorovich",
            "max_kantorovich",
            "choquet_kantorovich",
            "cesaro:kantorovich",
        ] {
            let fam = family(tag, &c, &d, &p).unwrap();
            assert!(fam.member(2).is_ok(), "{tag}");
        }
        assert!(matches!(family("bernoulli", &c, &d, &p), Err(CliError::Config(_))));
        for spec in ["identity", "composition", "expr:x^2"] {
            assert!(limit(spec, &d, &p).is_ok());
        }
        assert!(limit("circle_mean", &d, &p).is_err());
        assert!(matches!(limit("mean", &d, &p), Err(CliError::Config(_))));
    }

    #[test]
    fn rotation_alpha() {
        assert_eq!(rotation_angle(&None).unwrap(), golden_angle());
        assert_eq!(rotation_angle(&Some(AlphaSpec::Value(1.0))).unwrap(), 1.0);
        assert!(rotation_angle(&Some(AlphaSpec::Named("silver".into()))).is_err());
        let c = cfg("family = \"weyl\"\nalpha = \"golden\"");
        assert_eq!(deficit_override(&c).unwrap(), None);
        let c = cfg("alpha = 0.5");
        assert_eq!(deficit_override(&c).unwrap(), Some(0.5));
    }

    #[test]
    fn probe_errors_carry_location() {
        let c = cfg("probes = [\"sqrt(x\"]");
        let d = domain(&c).unwrap();
        assert!(matches!(
            probes(&c, &d),
            Err(CliError::Core(korovkin::Error::Parse { offset: 6, .. }))
        ));
        let c = cfg("probes = [\"1/(x-0.5)\"]");
        assert!(matches!(
            probes(&c, &d),
            Err(CliError::Core(korovkin::Error::Evaluation { .. }))
        ));
    }
}
