use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_SCHEMA: &str = include_str!("../../data/cccs_schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttributeKind {
    Numeric,
    Nominal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AttributeCategory {
    Demographics,
    UnsecuredDebt,
    Assets,
    Expenditure,
    DebtDetails,
    Income,
    Identifier,
}

impl AttributeCategory {
    pub const ALL: [AttributeCategory; 7] = [
        AttributeCategory::Demographics,
        AttributeCategory::UnsecuredDebt,
        AttributeCategory::Assets,
        AttributeCategory::Expenditure,
        AttributeCategory::DebtDetails,
        AttributeCategory::Income,
        AttributeCategory::Identifier,
    ];
}

impl fmt::Display for AttributeCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: AttributeKind,
    pub category: AttributeCategory,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, kind: AttributeKind, category: AttributeCategory) -> Self {
        ColumnSpec {
            name: name.into(),
            kind,
            category,
        }
    }

    pub fn numeric(name: impl Into<String>, category: AttributeCategory) -> Self {
        Self::new(name, AttributeKind::Numeric, category)
    }

    pub fn nominal(name: impl Into<String>, category: AttributeCategory) -> Self {
        Self::new(name, AttributeKind::Nominal, category)
    }
}

/// Ordered list of column specifications with unique names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ColumnSpec>", into = "Vec<ColumnSpec>")]
pub struct Schema {
    columns: Vec<ColumnSpec>,
}

impl Schema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateColumn(c.name.clone()));
            }
        }
        Ok(Schema { columns })
    }

    /// The bundled credit-counselling schema.
    ///
    /// It covers the identifier, contact month/year, the demographic
    /// attributes (six of them nominal, `occupation` among them), unsecured
    /// debt, assets, the mortgage and per-product debt details
    /// (`ud*` balances, `cp*` contracted payments, `tc*` remaining terms for
    /// catalogues, collection agency, credit card, GE capital, overdraft,
    /// personal loan, other and store card), eleven monthly expenditure
    /// attributes and income. Monetary stocks are in GBP, expenditure and
    /// income in GBP/month. Datasets with further columns should supply their
    /// own schema file.
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_SCHEMA).expect("bundled schema is valid")
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&ColumnSpec> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    /// Names of all columns in the given category, in schema order.
    pub fn in_category(&self, category: AttributeCategory) -> Vec<String> {
        self.columns
            .iter()
            .filter(|c| c.category == category)
            .map(|c| c.name.clone())
            .collect()
    }
}

impl TryFrom<Vec<ColumnSpec>> for Schema {
    type Error = Error;

    fn try_from(columns: Vec<ColumnSpec>) -> Result<Self> {
        Schema::new(columns)
    }
}

impl From<Schema> for Vec<ColumnSpec> {
    fn from(s: Schema) -> Self {
        s.columns
    }
}
