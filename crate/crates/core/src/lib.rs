//! Marginal feature screening for ultra-high-dimensional categorical data with
//! a binary response.
//!
//! The crate provides the CAT-SIS trend-correlation screener alongside three
//! competitors (HLW-SIS, DC-SIS, MMLE), model-size selection rules, seeded
//! simulation generators with a replication harness, and a penalized logistic
//! post-screening pipeline.
//!
//! Data types, screeners, and generators are generic over [`Scalar`] (`f32` or
//! `f64`); the `*F64` and `*F32` aliases below name the common concrete
//! instantiations. Penalized fitting and the pipeline work in `f64`.

pub mod bench;
pub mod data;
pub mod error;
pub mod io;
pub mod logit;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod screen;
pub mod select;
pub mod simgen;

pub use data::{
    empirical_cells, CategoricalDesign, CellTable, Design, Method, NumericMatrix, ResponseKind,
    ResponseVector, ScreenResult, TrueModel,
};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use screen::{cat_sis, dc_sis, hlw_sis, mmle, screen, ScreenerConfig};
pub use select::{minimum_model_size, select, SelectionRule};

pub type CategoricalDesignF64 = CategoricalDesign<f64>;
pub type CategoricalDesignF32 = CategoricalDesign<f32>;
pub type NumericMatrixF64 = NumericMatrix<f64>;
pub type NumericMatrixF32 = NumericMatrix<f32>;
pub type DesignF64 = Design<f64>;
pub type DesignF32 = Design<f32>;
pub type ResponseVectorF64 = ResponseVector<f64>;
pub type ResponseVectorF32 = ResponseVector<f32>;
pub type ScreenResultF64 = ScreenResult<f64>;
pub type ScreenResultF32 = ScreenResult<f32>;
pub type DatasetF64 = simgen::Dataset<f64>;
