# coding: utf-8

# # The check suite
#
# The same checks back the command line. ``run_suite`` takes a configuration
# and returns an exit status plus one report per check.

# In[1]:

from yehfeynman.cli import RunConfig, run_suite

cfg = RunConfig(grid={"S": 1.0, "T": 1.0, "ns": 32, "nt": 32}, seed=11, n_samples=4000, workers=1)
status, reports = run_suite(cfg)
for r in reports:
    print(r.summary())
print("exit status", status)


# Reports are JSON lines; the same call from a shell is
#
#     yehfeynman suite --grid 32x32 --seed 11 --samples 4000 --report out.jsonl

# In[2]:

print(reports[0].to_line()[:200])
