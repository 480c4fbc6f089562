use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cube::point::{check_n, CubePoint};
use crate::error::{Error, Result};

/// A complex-valued function on `{-1,+1}^n`, tabulated in point-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanFunction {
    n: usize,
    values: Vec<Complex64>,
}

impl BooleanFunction {
    pub fn new(n: usize, values: Vec<Complex64>) -> Result<Self> {
        check_n(n)?;
        if values.len() != 1usize << n {
            return Err(Error::invalid(format!(
                "table length {} does not match 2^{n}",
                values.len()
            )));
        }
        Ok(BooleanFunction { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(CubePoint) -> Complex64) -> Result<Self> {
        check_n(n)?;
        let values = (0..1u32 << n)
            .map(|i| f(CubePoint::new(n, i).expect("index in range")))
            .collect();
        Ok(BooleanFunction { n, values })
    }

    pub fn constant(n: usize, c: Complex64) -> Result<Self> {
        check_n(n)?;
        Ok(BooleanFunction {
            n,
            values: vec![c; 1 << n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn eval(&self, p: CubePoint) -> Result<Complex64> {
        if p.n() != self.n {
            return Err(Error::dim(format!(
                "point has n = {}, function has n = {}",
                p.n(),
                self.n
            )));
        }
        Ok(self.values[p.index() as usize])
    }

    #[inline]
    pub fn value_at(&self, index: u32) -> Complex64 {
        self.values[index as usize]
    }

    /// Squared norm under the normalized counting measure:
    /// `2^{-n} Σ_τ |f(τ)|²`.
    pub fn norm_sq(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        sum / self.values.len() as f64
    }

    /// Mean value `E f = 2^{-n} Σ_τ f(τ)`.
    pub fn mean(&self) -> Complex64 {
        let sum: Complex64 = self.values.iter().sum();
        sum / self.values.len() as f64
    }

    pub fn scale(&self, c: Complex64) -> BooleanFunction {
        BooleanFunction {
            n: self.n,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Serializes to the interchange JSON object `{n, values: [[re, im], …]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&FunctionJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: FunctionJson =
            serde_json::from_str(s).map_err(|e| Error::invalid(format!("bad function JSON: {e}")))?;
        raw.try_into()
    }

    /// Writes the CSV alternative, columns `index,re,im`, in index order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", i, v.re, v.im));
        }
        out
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::invalid(format!("CSV line {}: want 3 fields", lineno + 1)));
            }
            let idx: usize = fields[0]
                .parse()
                .map_err(|e| Error::invalid(format!("CSV line {}: {e}", lineno + 1)))?;
            let re: f64 = fields[1]
                .parse()
                .map_err(|e| Error::invalid(format!("CSV line {}: {e}", lineno + 1)))?;
            let im: f64 = fields[2]
                .parse()
                .map_err(|e| Error::invalid(format!("CSV line {}: {e}", lineno + 1)))?;
            if idx != rows.len() {
                return Err(Error::invalid(format!(
                    "CSV rows must be in index order; got {idx} at row {}",
                    rows.len()
                )));
            }
            rows.push(Complex64::new(re, im));
        }
        let n = rows.len().trailing_zeros() as usize;
        if rows.is_empty() || rows.len() != 1 << n {
            return Err(Error::invalid(format!(
                "CSV row count {} is not a power of two",
                rows.len()
            )));
        }
        BooleanFunction::new(n, rows)
    }
}

#[derive(Serialize, Deserialize)]
struct FunctionJson {
    n: usize,
    values: Vec<[f64; 2]>,
}

impl From<&BooleanFunction> for FunctionJson {
    fn from(f: &BooleanFunction) -> Self {
        FunctionJson {
            n: f.n,
            values: f.values.iter().map(|v| [v.re, v.im]).collect(),
        }
    }
}

impl TryFrom<FunctionJson> for BooleanFunction {
    type Error = Error;

    fn try_from(raw: FunctionJson) -> Result<Self> {
        let values = raw
            .values
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        BooleanFunction::new(raw.n, values)
    }
}
