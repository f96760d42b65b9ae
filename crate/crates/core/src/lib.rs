pub mod certify;
pub mod families;
pub mod game;
pub mod lp;
pub mod oracle;
pub mod poly;
pub mod rational;
pub mod report;
pub mod signature;
pub mod sweep;
