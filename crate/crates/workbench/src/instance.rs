//! JSON instance files.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use formalpatch_core::par::Exec;
use formalpatch_core::patch::{make_config, pose_problem, Candidate, OpenConfig, PatchProblem};
use formalpatch_core::surface::{BaseRing, PrimeData};
use formalpatch_core::tower::PresModule;
use formalpatch_core::{Field, FreeVec, Poly, PolyRing};
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub vars: Vec<String>,
    pub t: String,
    #[serde(default)]
    pub relations: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeSpec {
    pub ideal: Vec<String>,
    pub separator: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    /// `base`, `U1`, `U2` or `U0`.
    pub ring: String,
    pub generators: usize,
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    pub f1: String,
    pub f2: String,
    pub depth: u32,
    #[serde(default)]
    pub dschedule: Vec<u32>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub m1: String,
    pub m2: String,
    pub m0: String,
    pub alpha1: Vec<Vec<String>>,
    pub alpha2: Vec<Vec<String>>,
    pub rank: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainmentSpec {
    pub c: u32,
    pub nmax: u32,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    pub modules: Vec<String>,
    #[serde(default)]
    pub depth: Option<u32>,
    #[serde(default)]
    pub localize: Option<String>,
    #[serde(default)]
    pub pool: Option<Vec<String>>,
    #[serde(default)]
    pub containment: Option<ContainmentSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub field: Option<String>,
    pub ring: RingSpec,
    pub primes: Vec<PrimeSpec>,
    #[serde(default)]
    pub intersections: Vec<Vec<String>>,
    #[serde(default)]
    pub pool: Vec<String>,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default)]
    pub config: Option<ConfigSpec>,
    #[serde(default)]
    pub problem: Option<ProblemSpec>,
    #[serde(default)]
    pub candidates: BTreeMap<String, Vec<Vec<String>>>,
    /// Elements of `M0`, in coordinates over the `U0` ring.
    #[serde(default)]
    pub elements: BTreeMap<String, Vec<String>>,
    /// Elements of the base ring.
    #[serde(default)]
    pub base_elements: BTreeMap<String, String>,
    #[serde(default)]
    pub tower: Option<TowerSpec>,
    /// The instance violates a hypothesis on purpose.
    #[serde(default)]
    pub demonstration: bool,
}

/// A validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub source: String,
    pub name: String,
    pub file: InstanceFile,
    pub base: BaseRing,
    pub pd: PrimeData,
}

const REQUIRED: &[&str] = &["ring", "primes"];

fn parse_field(text: &str) -> Option<Field> {
    if text == "QQ" {
        return Some(Field::Rational);
    }
    let p = text
        .strip_prefix("GF(")?
        .strip_suffix(')')?
        .trim()
        .parse()
        .ok()?;
    Field::prime(p).ok()
}

impl Instance {
    pub fn load(path: &Path) -> Result<Instance, CliError> {
        let source = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::instance(&source, "", &e.to_string()))?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_default();
        Instance::parse(&source, &stem, &text)
    }

    pub fn parse(source: &str, default_name: &str, text: &str) -> Result<Instance, CliError> {
        let value: Value = if text.trim().is_empty() {
            Value::Object(Default::default())
        } else {
            serde_json::from_str(text)
                .map_err(|e| CliError::instance(source, "", &format!("invalid JSON: {e}")))?
        };
        let Some(obj) = value.as_object() else {
            return Err(CliError::instance(
                source,
                "",
                "top level must be an object",
            ));
        };
        for key in REQUIRED {
            if !obj.contains_key(*key) {
                return Err(CliError::instance(
                    source,
                    key,
                    &format!("missing key: {key}"),
                ));
            }
        }
        let spec: InstanceFile = serde_json::from_value(value)
            .map_err(|e| CliError::instance(source, "", &format!("schema violation: {e}")))?;
        let field_text = spec.field.clone().unwrap_or_else(|| "QQ".into());
        let field = parse_field(&field_text).ok_or_else(|| {
            CliError::instance(source, "field", &format!("unknown field `{field_text}`"))
        })?;
        let vars: Vec<&str> = spec.ring.vars.iter().map(String::as_str).collect();
        let rels: Vec<&str> = spec.ring.relations.iter().map(String::as_str).collect();
        let base = BaseRing::new(field, &vars, &rels, &spec.ring.t)
            .map_err(|e| CliError::engine_at(source, "ring", e))?;
        let ring = base.ring().clone();
        let mut primes = Vec::new();
        let mut seps = Vec::new();
        for (j, p) in spec.primes.iter().enumerate() {
            let key = format!("primes[{j}]");
            let gens = p
                .ideal
                .iter()
                .map(|g| ring.parse(g))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::engine_at(source, &format!("{key}.ideal"), e))?;
            primes.push(gens);
            seps.push(
                ring.parse(&p.separator)
                    .map_err(|e| CliError::engine_at(source, &format!("{key}.separator"), e))?,
            );
        }
        let pd = PrimeData::validate(&base, primes, seps)
            .map_err(|e| CliError::engine_at(source, "primes", e))?;
        let name = spec
            .name
            .clone()
            .unwrap_or_else(|| default_name.to_string());
        Ok(Instance {
            source: source.to_string(),
            name,
            file: spec,
            base,
            pd,
        })
    }

    fn err(&self, key: &str, e: formalpatch_core::Error) -> CliError {
        CliError::engine_at(&self.source, key, e)
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.base.ring()
    }

    pub fn poly(&self, key: &str, text: &str) -> Result<Poly, CliError> {
        self.ring().parse(text).map_err(|e| self.err(key, e))
    }

    pub fn polys(&self, key: &str, texts: &[String]) -> Result<Vec<Poly>, CliError> {
        texts
            .iter()
            .enumerate()
            .map(|(k, t)| self.poly(&format!("{key}[{k}]"), t))
            .collect()
    }

    pub fn pool(&self) -> Result<Vec<Poly>, CliError> {
        self.polys("pool", &self.file.pool)
    }

    pub fn intersections(&self) -> Result<Vec<Vec<Poly>>, CliError> {
        self.file
            .intersections
            .iter()
            .enumerate()
            .map(|(k, g)| self.polys(&format!("intersections[{k}]"), g))
            .collect()
    }

    fn config_spec(&self) -> Result<&ConfigSpec, CliError> {
        self.file
            .config
            .as_ref()
            .ok_or_else(|| CliError::instance(&self.source, "config", "missing key: config"))
    }

    pub fn default_depth(&self) -> Option<u32> {
        self.file.config.as_ref().map(|c| c.depth)
    }

    pub fn schedule(&self) -> Vec<u32> {
        match &self.file.config {
            Some(c) if !c.dschedule.is_empty() => c.dschedule.clone(),
            _ => vec![0, 1, 2, 3],
        }
    }

    pub fn config(&self, depth: Option<u32>) -> Result<OpenConfig, CliError> {
        let c = self.config_spec()?;
        let f1 = self.poly("config.f1", &c.f1)?;
        let f2 = self.poly("config.f2", &c.f2)?;
        make_config(&self.base, &self.pd, &f1, &f2, depth.unwrap_or(c.depth))
            .map_err(|e| self.err("config", e))
    }

    fn module_ring(
        &self,
        key: &str,
        which: &str,
        config: Option<&OpenConfig>,
    ) -> Result<Arc<PolyRing>, CliError> {
        if which == "base" {
            return Ok(self.ring().clone());
        }
        let Some(c) = config else {
            return Err(CliError::instance(
                &self.source,
                key,
                "cover rings need a config",
            ));
        };
        match which {
            "U1" => Ok(c.r1().clone()),
            "U2" => Ok(c.r2().clone()),
            "U0" => Ok(c.r0().clone()),
            other => Err(CliError::instance(
                &self.source,
                key,
                &format!("unknown ring `{other}`"),
            )),
        }
    }

    pub fn module(&self, name: &str, config: Option<&OpenConfig>) -> Result<PresModule, CliError> {
        let key = format!("modules.{name}");
        let spec = self.file.modules.get(name).ok_or_else(|| {
            CliError::instance(&self.source, &key, &format!("unknown module `{name}`"))
        })?;
        let ring = self.module_ring(&format!("{key}.ring"), &spec.ring, config)?;
        let rels = spec
            .relations
            .iter()
            .enumerate()
            .map(|(k, r)| self.vector(&format!("{key}.relations[{k}]"), &ring, r, spec.generators))
            .collect::<Result<Vec<_>, _>>()?;
        PresModule::new(ring, spec.generators, &rels).map_err(|e| self.err(&key, e))
    }

    fn vector(
        &self,
        key: &str,
        ring: &PolyRing,
        coords: &[String],
        rank: usize,
    ) -> Result<FreeVec, CliError> {
        if coords.len() != rank {
            return Err(CliError::instance(
                &self.source,
                key,
                &format!("expected {rank} coordinates, found {}", coords.len()),
            ));
        }
        coords
            .iter()
            .map(|c| ring.parse(c))
            .collect::<Result<Vec<_>, _>>()
            .map(FreeVec::new)
            .map_err(|e| self.err(key, e))
    }

    fn problem_spec(&self) -> Result<&ProblemSpec, CliError> {
        self.file
            .problem
            .as_ref()
            .ok_or_else(|| CliError::instance(&self.source, "problem", "missing key: problem"))
    }

    fn m0_rank(&self) -> Result<usize, CliError> {
        let p = self.problem_spec()?;
        self.file
            .modules
            .get(&p.m0)
            .map(|m| m.generators)
            .ok_or_else(|| {
                CliError::instance(
                    &self.source,
                    "problem.m0",
                    &format!("unknown module `{}`", p.m0),
                )
            })
    }

    /// Pose the problem; a failed hypothesis comes back as `Err(Problem)`.
    pub fn problem(
        &self,
        config: &OpenConfig,
        exec: Exec,
    ) -> Result<formalpatch_core::Result<PatchProblem>, CliError> {
        let p = self.problem_spec()?;
        let m1 = self.module(&p.m1, Some(config))?;
        let m2 = self.module(&p.m2, Some(config))?;
        let m0 = self.module(&p.m0, Some(config))?;
        let r0 = config.r0();
        let alpha = |key: &str, rows: &[Vec<String>]| -> Result<Vec<FreeVec>, CliError> {
            rows.iter()
                .enumerate()
                .map(|(k, r)| self.vector(&format!("problem.{key}[{k}]"), r0, r, m0.ngens()))
                .collect()
        };
        let a1 = alpha("alpha1", &p.alpha1)?;
        let a2 = alpha("alpha2", &p.alpha2)?;
        Ok(pose_problem(config, &m1, &m2, &m0, &a1, &a2, p.rank, exec))
    }

    pub fn candidate_names(&self) -> Vec<String> {
        self.file.candidates.keys().cloned().collect()
    }

    pub fn candidate(&self, name: &str, config: &OpenConfig) -> Result<Candidate, CliError> {
        let key = format!("candidates.{name}");
        let rows = self.file.candidates.get(name).ok_or_else(|| {
            CliError::instance(&self.source, &key, &format!("unknown candidate `{name}`"))
        })?;
        let rank = self.m0_rank()?;
        let gens = rows
            .iter()
            .enumerate()
            .map(|(k, r)| self.vector(&format!("{key}[{k}]"), config.r0(), r, rank))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Candidate::new(name, gens))
    }

    pub fn element(&self, name: &str, config: &OpenConfig) -> Result<FreeVec, CliError> {
        let key = format!("elements.{name}");
        let coords = self.file.elements.get(name).ok_or_else(|| {
            CliError::instance(&self.source, &key, &format!("unknown element `{name}`"))
        })?;
        let rank = self.m0_rank()?;
        self.vector(&key, config.r0(), coords, rank)
    }

    pub fn base_element(&self, name: &str) -> Result<Poly, CliError> {
        let key = format!("base_elements.{name}");
        let text = self.file.base_elements.get(name).ok_or_else(|| {
            CliError::instance(&self.source, &key, &format!("unknown element `{name}`"))
        })?;
        self.poly(&key, text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_reports_missing_ring() {
        let err = Instance::parse("empty.json", "empty", "").unwrap_err();
        assert_eq!(err.to_string(), "empty.json: ring: missing key: ring");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn prime_without_t_is_rejected_with_key() {
        let text = r#"{"ring": {"vars": ["x", "t"], "t": "t"}, "primes": [{"ideal": ["x"], "separator": "1"}]}"#;
        let err = Instance::parse("bad.json", "bad", text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("bad.json: primes:"), "{msg}");
        assert!(msg.contains("t is not in P_1"), "{msg}");
    }

    #[test]
    fn finite_fields_parse() {
        assert_eq!(parse_field("GF(7)"), Some(Field::prime(7).unwrap()));
        assert_eq!(parse_field("GF(8)"), None);
        assert_eq!(parse_field("QQ"), Some(Field::Rational));
    }
}
