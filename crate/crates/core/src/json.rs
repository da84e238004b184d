//! JSON wire formats.
//!
//! A complex scalar is a two-element array `[re, im]`; a matrix is a
//! row-major array of rows of such pairs. Floats are written with 17
//! significant digits so that every value round-trips exactly.

use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::channel::{DilationModel, KrausChannel};
use crate::control::{DarkStateResidual, FeasibilityReport};
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

pub type ComplexPair = [f64; 2];

pub fn pair(z: Complex64) -> ComplexPair {
    [z.re, z.im]
}

pub fn from_pair(p: ComplexPair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn vector_to_json(v: &[Complex64]) -> Vec<ComplexPair> {
    v.iter().copied().map(pair).collect()
}

pub fn vector_from_json(v: &[ComplexPair]) -> Vec<Complex64> {
    v.iter().copied().map(from_pair).collect()
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.rows()).map(|i| vector_to_json(m.row(i))).collect()
}

pub fn matrix_from_json(rows: &[Vec<ComplexPair>]) -> Result<ComplexMatrix> {
    let nested: Vec<Vec<Complex64>> = rows.iter().map(|r| vector_from_json(r)).collect();
    ComplexMatrix::from_rows(&nested)
}

/// `{"dim": M, "kraus": [matrix, ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub dim: usize,
    pub kraus: Vec<Vec<Vec<ComplexPair>>>,
}

impl ChannelJson {
    pub fn from_channel(c: &KrausChannel) -> Self {
        Self {
            dim: c.dim(),
            kraus: c.ops().iter().map(matrix_to_json).collect(),
        }
    }

    /// Parses every operator and checks it against `dim` before building
    /// the channel.
    pub fn to_channel(&self) -> Result<KrausChannel> {
        let ops = self
            .kraus
            .iter()
            .map(|m| matrix_from_json(m))
            .collect::<Result<Vec<_>>>()?;
        for op in &ops {
            if op.shape() != (self.dim, self.dim) {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: op.rows().max(op.cols()),
                });
            }
        }
        KrausChannel::new(ops)
    }
}

/// `{"h_s": matrix, "h_b": matrix, "h_sb": matrix, "bath_probs": [p...], "time": t}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DilationJson {
    pub h_s: Vec<Vec<ComplexPair>>,
    pub h_b: Vec<Vec<ComplexPair>>,
    pub h_sb: Vec<Vec<ComplexPair>>,
    pub bath_probs: Vec<f64>,
    pub time: f64,
}

impl DilationJson {
    pub fn from_model(m: &DilationModel) -> Self {
        Self {
            h_s: matrix_to_json(m.h_s()),
            h_b: matrix_to_json(m.h_b()),
            h_sb: matrix_to_json(m.h_sb()),
            bath_probs: m.bath_probs().to_vec(),
            time: m.time(),
        }
    }

    pub fn to_model(&self) -> Result<DilationModel> {
        DilationModel::new(
            matrix_from_json(&self.h_s)?,
            matrix_from_json(&self.h_b)?,
            matrix_from_json(&self.h_sb)?,
            self.bath_probs.clone(),
            self.time,
        )
    }
}

/// Serialized form of [`FeasibilityReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportJson {
    pub m0: usize,
    pub m1: usize,
    pub m2: usize,
    pub d_given: usize,
    pub d_minimal: usize,
    pub dimension_sufficient: bool,
    pub w_rank: usize,
    pub nullity: usize,
    pub dark_states: Vec<Vec<ComplexPair>>,
    pub verification: Vec<DarkStateResidual>,
}

impl From<&FeasibilityReport> for ReportJson {
    fn from(r: &FeasibilityReport) -> Self {
        Self {
            m0: r.m0,
            m1: r.m1,
            m2: r.m2,
            d_given: r.d_given,
            d_minimal: r.d_minimal,
            dimension_sufficient: r.dimension_sufficient,
            w_rank: r.w_rank,
            nullity: r.nullity,
            dark_states: r.dark_basis.iter().map(|v| vector_to_json(v)).collect(),
            verification: r.verification.clone(),
        }
    }
}

/// Pretty printer that writes finite floats in scientific notation with 17
/// significant digits.
struct PreciseFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for PreciseFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with lossless floats and a trailing newline. Non-finite
/// floats become `null`, as in `serde_json`.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
