#![allow(dead_code)]
pub mod gen;
pub mod norm;
pub mod corpus;
pub mod scenario;
