pub mod error;
pub mod linalg;
pub mod opnorm;
pub mod seeds;
pub mod spaces;
pub mod tensornorm;
pub mod elliptope;
pub mod constants;
pub mod randomized;
