# Truth tables, polynomials and operators
