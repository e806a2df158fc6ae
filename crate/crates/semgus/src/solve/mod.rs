//! Solving strategies: external Horn solving over the clause encodings,
//! enumerative search against the reference interpreter, counterexample-
//! guided synthesis for verifiable specifications, and a portfolio runner.
