use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PreprocessLog;
use crate::error::{Error, Result};
use crate::table::{AttributeCategory, DataTable, Schema};

/// Contact month/year columns, dropped by every stage.
pub const TIME_COLUMNS: [&str; 2] = ["month", "year"];

const STAGE_B_COLUMNS: [&str; 6] = ["gender", "marital", "tenure", "region", "employment", "occupation"];

/// A named attribute subset used for one round of clustering experiments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSpec {
    pub name: String,
    #[serde(default)]
    pub excluded_categories: BTreeSet<AttributeCategory>,
    #[serde(default)]
    pub excluded_columns: BTreeSet<String>,
}

impl StageSpec {
    pub const KNOWN: [&'static str; 3] = ["A", "B", "C"];

    /// All attributes.
    pub fn a() -> Self {
        StageSpec {
            name: "A".into(),
            excluded_categories: BTreeSet::new(),
            excluded_columns: BTreeSet::new(),
        }
    }

    /// Stage A minus the nominal demographic leftovers and occupation.
    pub fn b() -> Self {
        StageSpec {
            name: "B".into(),
            excluded_categories: BTreeSet::new(),
            excluded_columns: STAGE_B_COLUMNS.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Stage B minus the debt details.
    pub fn c() -> Self {
        let mut spec = Self::b();
        spec.name = "C".into();
        spec.excluded_categories.insert(AttributeCategory::DebtDetails);
        spec
    }

    pub fn named(name: &str) -> Result<Self> {
        match name {
            "A" | "a" => Ok(Self::a()),
            "B" | "b" => Ok(Self::b()),
            "C" | "c" => Ok(Self::c()),
            _ => Err(Error::UnknownStage {
                name: name.to_string(),
                known: Self::KNOWN.join(", "),
            }),
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn keeps(&self, name: &str, category: AttributeCategory) -> bool {
        category != AttributeCategory::Identifier
            && !TIME_COLUMNS.contains(&name)
            && !self.excluded_categories.contains(&category)
            && !self.excluded_columns.contains(name)
    }

    /// Names of the schema columns this stage keeps, in schema order.
    pub fn retained_columns(&self, schema: &Schema) -> Vec<String> {
        schema
            .columns()
            .iter()
            .filter(|c| self.keeps(&c.name, c.category))
            .map(|c| c.name.clone())
            .collect()
    }
}

/// Drops the stage's excluded columns plus identifier and contact-time columns.
/// Excluded names absent from the table produce a note, not an error.
pub fn select_stage(table: &DataTable, stage: &StageSpec) -> (DataTable, PreprocessLog) {
    let mut log = PreprocessLog {
        stage: Some(stage.name.clone()),
        ..Default::default()
    };
    for name in &stage.excluded_columns {
        if table.schema().get(name).is_none() {
            log.notes.push(format!("stage {}: excluded column `{name}` not present", stage.name));
        }
    }
    let out = table.retain_columns(|c| stage.keeps(&c.name, c.category));
    (out, log)
}
