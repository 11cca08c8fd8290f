/* Copyright 2026 The semgap Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

/* Compiled as C to keep semgap.h usable from C. */
#include "semgap/semgap.h"

int semgap_c_header_check(void) {
  sg_run_summary s;
  sg_aggregate a;
  s.run_index = 0;
  a.runs = 0;
  return (s.run_index == a.runs && SG_OK == 0) ? 1 : 0;
}
