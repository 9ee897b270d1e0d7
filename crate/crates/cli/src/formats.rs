//! JSON input files: fans, morphisms, constructible functions, classes and
//! good closures. File references inside a file are resolved relative to
//! the directory containing it.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use toric_csm::chow::CycleClass;
use toric_csm::constructible::ConstructibleFunction;
use toric_csm::corpus::{Corpus, NamedMorphism};
use toric_csm::csm::GoodClosure;
use toric_csm::fan::{Cone, Fan, ToricMorphism};
use toric_csm::lattice::{LatticeMatrix, LatticeVector};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io(_) => 2,
            CliError::Invalid { .. } => 3,
        }
    }

    fn parse(path: &Path, message: impl ToString) -> Self {
        CliError::Parse { path: path.display().to_string(), message: message.to_string() }
    }

    pub fn invalid(path: &Path, message: impl ToString) -> Self {
        CliError::Invalid { path: path.display().to_string(), message: message.to_string() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub name: String,
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl FanFile {
    pub fn of(fan: &Fan) -> Self {
        FanFile {
            name: fan.name().to_string(),
            dim: fan.dim(),
            rays: fan
                .rays()
                .iter()
                .map(|r| r.entries().iter().map(|x| i64::try_from(x).expect("ray entries fit in i64")).collect())
                .collect(),
            max_cones: fan.max_cones().iter().map(|c| c.rays().to_vec()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismFile {
    pub source: String,
    pub target: String,
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionFile {
    fan: String,
    #[serde(default)]
    values: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassFile {
    fan: String,
    class: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClosureFile {
    fan: String,
    boundary_rays: Vec<usize>,
}

/// Either kind of push-forward input.
pub enum Pushable {
    Function(ConstructibleFunction),
    Class(CycleClass),
}

/// Reads input files, caching fans by canonical path and remembering the
/// digest of every file read.
#[derive(Default)]
pub struct Loader {
    fans: HashMap<PathBuf, Arc<Fan>>,
    digests: BTreeMap<String, String>,
}

impl Loader {
    pub fn new() -> Self {
        Self::default()
    }

    /// `(path, sha256)` of every file read so far, sorted by path.
    pub fn digests(&self) -> &BTreeMap<String, String> {
        &self.digests
    }

    fn read(&mut self, path: &Path) -> Result<Value, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.digests.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        serde_json::from_slice(&bytes).map_err(|e| CliError::parse(path, e))
    }

    fn typed<T: for<'de> Deserialize<'de>>(&mut self, path: &Path) -> Result<T, CliError> {
        let value = self.read(path)?;
        serde_json::from_value(value).map_err(|e| CliError::parse(path, e))
    }

    fn canonical(path: &Path) -> Result<PathBuf, CliError> {
        fs::canonicalize(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// A fan file; the fan must be smooth and complete.
    pub fn fan(&mut self, path: &Path) -> Result<Arc<Fan>, CliError> {
        let key = Self::canonical(path)?;
        if let Some(fan) = self.fans.get(&key) {
            return Ok(fan.clone());
        }
        let file: FanFile = self.typed(path)?;
        let fan = fan_from_file(&file).map_err(|e| CliError::invalid(path, e))?;
        let report = fan.report();
        if !report.is_complete() {
            let issues: Vec<String> =
                report.issues.iter().chain(&report.incomplete).map(ToString::to_string).collect();
            return Err(CliError::invalid(
                path,
                format!("fan `{}` is not smooth and complete: {}", fan.name(), issues.join("; ")),
            ));
        }
        let fan = Arc::new(fan);
        self.fans.insert(key, fan.clone());
        Ok(fan)
    }

    pub fn morphism(&mut self, path: &Path) -> Result<ToricMorphism, CliError> {
        let file: MorphismFile = self.typed(path)?;
        let source = self.fan(&relative(path, &file.source))?;
        let target = self.fan(&relative(path, &file.target))?;
        if file.matrix.iter().any(|row| row.len() != source.dim()) {
            return Err(CliError::invalid(
                path,
                format!("matrix rows must have {} entries (the source dimension)", source.dim()),
            ));
        }
        let matrix = LatticeMatrix::from_rows(&file.matrix, source.dim());
        let m = ToricMorphism::new(source, target, matrix).map_err(|e| CliError::invalid(path, e))?;
        m.require_compatible().map_err(|e| CliError::invalid(path, e))?;
        Ok(m)
    }

    /// A constructible function; `on` overrides the fan named in the file,
    /// which must then describe the same fan.
    pub fn function(&mut self, path: &Path, on: Option<&Arc<Fan>>) -> Result<ConstructibleFunction, CliError> {
        let file: FunctionFile = self.typed(path)?;
        let fan = self.fan_for(path, &file.fan, on)?;
        let values = cone_values(path, &fan, &file.values)?;
        ConstructibleFunction::from_values(fan, values).map_err(|e| CliError::invalid(path, e))
    }

    pub fn class(&mut self, path: &Path, on: Option<&Arc<Fan>>) -> Result<CycleClass, CliError> {
        let file: ClassFile = self.typed(path)?;
        let fan = self.fan_for(path, &file.fan, on)?;
        let terms = cone_values(path, &fan, &file.class)?;
        CycleClass::from_terms(fan, terms).map_err(|e| CliError::invalid(path, e))
    }

    /// A function file (with `values`) or a class file (with `class`).
    pub fn pushable(&mut self, path: &Path, on: Option<&Arc<Fan>>) -> Result<Pushable, CliError> {
        let value = self.read(path)?;
        if value.get("class").is_some() {
            self.class(path, on).map(Pushable::Class)
        } else {
            self.function(path, on).map(Pushable::Function)
        }
    }

    pub fn closure(&mut self, path: &Path) -> Result<GoodClosure, CliError> {
        let file: ClosureFile = self.typed(path)?;
        let fan = self.fan(&relative(path, &file.fan))?;
        GoodClosure::new(fan, file.boundary_rays).map_err(|e| CliError::invalid(path, e))
    }

    fn fan_for(&mut self, path: &Path, named: &str, on: Option<&Arc<Fan>>) -> Result<Arc<Fan>, CliError> {
        let own = self.fan(&relative(path, named))?;
        match on {
            Some(fan) if **fan != *own => Err(CliError::invalid(
                path,
                format!("file refers to fan `{}` but `{}` was expected", own.name(), fan.name()),
            )),
            Some(fan) => Ok(fan.clone()),
            None => Ok(own),
        }
    }

    /// A corpus: a single fan file, or a directory searched recursively for
    /// fan files (with `rays`) and morphism files (with `matrix`). Other
    /// JSON files are ignored. Morphisms are named after their file stem.
    pub fn corpus(&mut self, path: &Path) -> Result<Corpus, CliError> {
        let mut corpus = Corpus::default();
        if path.is_file() {
            corpus.fans.push(self.fan(path)?);
            return Ok(corpus);
        }
        for file in json_files(path)? {
            let value = self.read(&file)?;
            if value.get("rays").is_some() {
                let fan = self.fan(&file)?;
                if !corpus.fans.iter().any(|f| Arc::ptr_eq(f, &fan)) {
                    corpus.fans.push(fan);
                }
            } else if value.get("matrix").is_some() {
                let name = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                corpus.morphisms.push(NamedMorphism { name, morphism: self.morphism(&file)? });
            }
        }
        if corpus.fans.is_empty() {
            return Err(CliError::parse(path, "no fan files found"));
        }
        Ok(corpus)
    }
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let entries = fs::read_dir(&d).map_err(|e| CliError::Io(format!("{}: {e}", d.display())))?;
        for entry in entries {
            let p = entry.map_err(|e| CliError::Io(e.to_string()))?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "json") {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `reference` resolved against the directory of `file`.
pub fn relative(file: &Path, reference: &str) -> PathBuf {
    let reference = Path::new(reference);
    if reference.is_absolute() {
        return reference.to_path_buf();
    }
    file.parent().unwrap_or(Path::new(".")).join(reference)
}

fn cone_values(path: &Path, fan: &Fan, values: &BTreeMap<String, i64>) -> Result<Vec<(Cone, BigInt)>, CliError> {
    values
        .iter()
        .map(|(key, v)| {
            let cone =
                Cone::parse_key(key).ok_or_else(|| CliError::parse(path, format!("malformed cone key `{key}`")))?;
            if !fan.contains_cone(&cone) {
                return Err(CliError::invalid(path, format!("{{{cone}}} is not a cone of `{}`", fan.name())));
            }
            Ok((cone, BigInt::from(*v)))
        })
        .collect()
}

pub fn fan_from_file(file: &FanFile) -> toric_csm::Result<Fan> {
    let rays = file.rays.iter().map(|r| LatticeVector::from_i64s(r)).collect();
    let cones: Vec<Cone> = file.max_cones.iter().map(|c| Cone::new(c.iter().copied())).collect();
    Fan::from_max_cones(file.name.clone(), file.dim, rays, &cones)
}

/// One top-level field per line, values compact.
pub fn to_json_text(value: &impl Serialize) -> String {
    let value = serde_json::to_value(value).expect("serializable");
    let Value::Object(map) = value else {
        return format!("{value}\n");
    };
    let fields: Vec<String> = map.iter().map(|(k, v)| format!("  {}: {v}", Value::String(k.clone()))).collect();
    format!("{{\n{}\n}}\n", fields.join(",\n"))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    fs::write(path, to_json_text(value)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
