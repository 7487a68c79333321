pub mod fit;
pub mod quad;
pub mod series;
