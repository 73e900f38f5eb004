/**
 * Number formatting that byte-matches the core toolkit's file formats.
 *
 * The results and trajectory files are defined down to the byte, and
 * the reference writer formats floats with shortest round-trip repr
 * (results JSON) and fixed six decimals with round-half-even
 * (trajectory CSV). JavaScript's built-ins disagree in corner cases:
 * `String(2)` drops the ".0", the fixed/scientific switchover
 * thresholds differ, and `toFixed` rounds ties away from zero. These
 * helpers close those gaps.
 */

/** Shortest round-trip decimal form with a guaranteed decimal point,
 *  e.g. 2 -> "2.0", 0.25 -> "0.25", 1e-7 -> "1e-07". */
export function reprFloat(v: number): string {
  if (!Number.isFinite(v)) {
    throw new RangeError(`cannot format non-finite value ${v}`);
  }
  const negative = v < 0 || Object.is(v, -0);
  const abs = Math.abs(v);
  const sign = negative ? "-" : "";
  if (abs === 0) return sign + "0.0";

  // Decompose the shortest-digits form into (digits, exponent) where
  // value = 0.D1 D2 ... * 10^(e10 + 1), i.e. e10 is the power of ten
  // of the leading digit.
  let digits: string;
  let e10: number;
  const s = String(abs);
  const eIdx = s.indexOf("e");
  if (eIdx >= 0) {
    const mant = s.slice(0, eIdx);
    e10 = parseInt(s.slice(eIdx + 1), 10);
    const dot = mant.indexOf(".");
    digits = dot >= 0 ? mant.slice(0, dot) + mant.slice(dot + 1) : mant;
  } else {
    const dot = s.indexOf(".");
    if (dot < 0) {
      digits = s;
      e10 = s.length - 1;
    } else {
      const intPart = s.slice(0, dot);
      const fracPart = s.slice(dot + 1);
      if (intPart === "0") {
        let lead = 0;
        while (lead < fracPart.length && fracPart[lead] === "0") lead++;
        digits = fracPart.slice(lead);
        e10 = -(lead + 1);
      } else {
        digits = intPart + fracPart;
        e10 = intPart.length - 1;
      }
    }
  }
  while (digits.length > 1 && digits.endsWith("0")) {
    digits = digits.slice(0, -1);
  }

  // Fixed notation for leading-digit exponents in [-4, 16), scientific
  // with a signed two-digit exponent otherwise.
  if (e10 >= -4 && e10 < 16) {
    if (e10 >= digits.length - 1) {
      return sign + digits + "0".repeat(e10 - (digits.length - 1)) + ".0";
    }
    if (e10 >= 0) {
      return sign + digits.slice(0, e10 + 1) + "." + digits.slice(e10 + 1);
    }
    return sign + "0." + "0".repeat(-e10 - 1) + digits;
  }
  const mant = digits.length > 1 ? digits[0] + "." + digits.slice(1) : digits;
  const expSign = e10 < 0 ? "-" : "+";
  const expAbs = Math.abs(e10).toString().padStart(2, "0");
  return sign + mant + "e" + expSign + expAbs;
}

/** Fixed-point with six decimals, rounding the exact binary value of
 *  the double half-to-even, e.g. 0.0078125 -> "0.007812" (toFixed says
 *  "0.007813"). */
export function fixed6(v: number): string {
  if (!Number.isFinite(v)) {
    throw new RangeError(`cannot format non-finite value ${v}`);
  }
  const negative = v < 0 || Object.is(v, -0);
  const abs = Math.abs(v);

  // Exact decomposition abs = mantissa * 2^exp2 via the IEEE-754 bits.
  const buf = new DataView(new ArrayBuffer(8));
  buf.setFloat64(0, abs);
  const bits = buf.getBigUint64(0);
  const rawExp = Number((bits >> 52n) & 0x7ffn);
  const rawMant = bits & 0xfffffffffffffn;
  let mantissa: bigint;
  let exp2: number;
  if (rawExp === 0) {
    mantissa = rawMant; // subnormal
    exp2 = -1074;
  } else {
    mantissa = rawMant | (1n << 52n);
    exp2 = rawExp - 1075;
  }

  // Round(abs * 10^6) half-to-even, exactly.
  const scaled = mantissa * 1000000n;
  let units: bigint;
  if (exp2 >= 0) {
    units = scaled << BigInt(exp2);
  } else {
    const shift = BigInt(-exp2);
    const q = scaled >> shift;
    const r = scaled & ((1n << shift) - 1n);
    const half = 1n << (shift - 1n);
    if (r > half || (r === half && (q & 1n) === 1n)) {
      units = q + 1n;
    } else {
      units = q;
    }
  }

  const text = units.toString().padStart(7, "0");
  const intPart = text.slice(0, -6);
  const fracPart = text.slice(-6);
  return (negative ? "-" : "") + intPart + "." + fracPart;
}

/** Round-half-to-even to an integer, matching the reference runtime's
 *  rounding of exact-hundredths ratios. */
export function roundTiesEven(v: number): number {
  const floor = Math.floor(v);
  const diff = v - floor;
  if (diff > 0.5) return floor + 1;
  if (diff < 0.5) return floor;
  return floor % 2 === 0 ? floor : floor + 1;
}
