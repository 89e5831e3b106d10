use std::collections::HashMap;
use std::path::Path;

use chrono::NaiveDate;
use thiserror::Error;

use super::RuntimeError;

/// Fixture prices shipped with the interpreter.
const DEFAULT_PRICES: &str = "\
# date, company, price
2021-01-15, ABC Co., 98.0
2021-01-17, ABC Co., 100.0
2021-01-18, ABC Co., 101.5
2021-01-19, ABC Co., 104.0
2021-01-20, ABC Co., 103.25
2021-01-21, ABC Co., 108.0
2021-01-22, ABC Co., 112.5
2021-01-17, XYZ Ltd., 50.0
2021-01-22, XYZ Ltd., 47.5
";

#[derive(Debug, Error)]
pub enum PriceError {
    #[error("cannot read price table: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed price table: {0}")]
    Csv(#[from] csv::Error),
    #[error("price table line {line}: {message}")]
    Row { line: u64, message: String },
}

/// Closing prices by company and date.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PriceTable {
    prices: HashMap<(String, NaiveDate), f64>,
}

impl PriceTable {
    pub fn empty() -> Self {
        PriceTable::default()
    }

    pub fn embedded() -> Self {
        PriceTable::parse(DEFAULT_PRICES).expect("embedded price table is well formed")
    }

    pub fn load(path: &Path) -> Result<Self, PriceError> {
        PriceTable::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses `date, company, price` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, PriceError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut table = PriceTable::empty();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let row = |message: String| PriceError::Row { line, message };
            let [date, company, price] = [0, 1, 2].map(|i| record.get(i).unwrap_or(""));
            let date = NaiveDate::parse_from_str(date, "%Y-%m-%d")
                .map_err(|e| row(format!("bad date `{date}`: {e}")))?;
            let price: f64 = price.parse().map_err(|_| row(format!("bad price `{price}`")))?;
            table.insert(company, date, price);
        }
        Ok(table)
    }

    pub fn insert(&mut self, company: &str, date: NaiveDate, price: f64) {
        self.prices.insert((company.to_string(), date), price);
    }

    pub fn get(&self, company: &str, date: NaiveDate) -> Option<f64> {
        self.prices.get(&(company.to_string(), date)).copied()
    }

    pub fn lookup(&self, company: &str, date: NaiveDate) -> Result<f64, RuntimeError> {
        self.get(company, date).ok_or_else(|| RuntimeError::MissingPrice {
            company: company.to_string(),
            date,
        })
    }

    /// Dates with a price for `company`, in order.
    pub fn dates(&self, company: &str) -> Vec<NaiveDate> {
        let mut dates: Vec<NaiveDate> = self
            .prices
            .keys()
            .filter(|(c, _)| c == company)
            .map(|&(_, d)| d)
            .collect();
        dates.sort();
        dates
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}
