#![allow(dead_code)]

pub mod checks;
pub mod gen;
pub mod golden;
pub mod oracle;
