#!/usr/bin/env python3
# Copyright 2026 The Lacuna Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates src/text/unicode_tables.inc from Python's unicodedata.

Usage: python3 scripts/gen_unicode_tables.py > src/text/unicode_tables.inc
"""

import sys
import unicodedata


def strip_marks(s):
    decomposed = unicodedata.normalize("NFD", s)
    kept = "".join(c for c in decomposed if unicodedata.category(c) != "Mn")
    return unicodedata.normalize("NFC", kept)


def main():
    out = sys.stdout
    out.write("// Generated by scripts/gen_unicode_tables.py from Unicode %s. Do not edit.\n"
              % unicodedata.unidata_version)

    out.write("\nconstexpr LowerEntry kLowerTable[] = {\n")
    for cp in range(0x10000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        c = chr(cp)
        low = c.lower()
        if len(low) == 1 and low != c:
            out.write("    {0x%04X, 0x%04X},\n" % (cp, ord(low)))
    out.write("};\n")

    # Nonspacing mark ranges.
    ranges = []
    start = None
    for cp in range(0x10000):
        is_mark = not (0xD800 <= cp <= 0xDFFF) and unicodedata.category(chr(cp)) == "Mn"
        if is_mark and start is None:
            start = cp
        if not is_mark and start is not None:
            ranges.append((start, cp - 1))
            start = None
    out.write("\nconstexpr MarkRange kMarkRanges[] = {\n")
    for lo, hi in ranges:
        out.write("    {0x%04X, 0x%04X},\n" % (lo, hi))
    out.write("};\n")

    # Precomposed characters whose mark-stripped form differs.
    out.write("\nconstexpr StripEntry kStripTable[] = {\n")
    for cp in range(0x10000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        c = chr(cp)
        if unicodedata.category(c) == "Mn":
            continue
        s = strip_marks(c)
        if s != c:
            if len(s) > 3:
                raise SystemExit("strip result too long for U+%04X" % cp)
            cps = [ord(x) for x in s] + [0] * (3 - len(s))
            out.write("    {0x%04X, %d, {0x%04X, 0x%04X, 0x%04X}},\n"
                      % (cp, len(s), cps[0], cps[1], cps[2]))
    out.write("};\n")


if __name__ == "__main__":
    main()
