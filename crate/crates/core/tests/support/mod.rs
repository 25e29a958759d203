pub mod fermions;
