/* Hot loops for the Q-recursion engine.
 *
 * Arrays are passed via the buffer protocol, so this file has no numpy
 * dependency.  Value buffers are 1-based: slot 0 is unused, slot n holds
 * Q(n).  Both 4-byte and 8-byte unsigned layouts are supported; arithmetic
 * runs in signed 64-bit, which cannot overflow for values below the caps
 * enforced here.
 */
#define PY_SSIZE_T_CLEAN
#include <Python.h>
#include <stdint.h>

#define ST_OK 0
#define ST_DEATH 1
#define ST_OVERFLOW 2
#define ST_PARITY 3
#define ST_COUNT_OVERFLOW 4

/* advance(values, start, horizon, eps_even, eps_odd, cap)
 *   -> (status, step, bad_t1, bad_t2)
 *
 * Runs q[n] = q[n - q[n-1]] + q[n - q[n-2]] + eps(n) in place for
 * n = start..horizon.  Stops at the first n where a clock index is
 * non-positive (ST_DEATH, bad flags say which) or where the new value
 * would exceed cap (ST_OVERFLOW).
 */
static PyObject *
advance(PyObject *self, PyObject *args)
{
    Py_buffer view;
    long long start, horizon, eps_even, eps_odd;
    unsigned long long cap;

    if (!PyArg_ParseTuple(args, "w*LLLLK", &view, &start, &horizon,
                          &eps_even, &eps_odd, &cap))
        return NULL;
    if (view.itemsize != 4 && view.itemsize != 8) {
        PyBuffer_Release(&view);
        PyErr_SetString(PyExc_ValueError, "value buffer must hold 4- or 8-byte items");
        return NULL;
    }
    if ((long long)(view.len / view.itemsize) < horizon + 1) {
        PyBuffer_Release(&view);
        PyErr_SetString(PyExc_ValueError, "value buffer shorter than horizon + 1");
        return NULL;
    }

    int status = ST_OK, bad1 = 0, bad2 = 0;
    long long step = 0;

    if (view.itemsize == 4) {
        uint32_t *q = (uint32_t *)view.buf;
        for (long long n = start; n <= horizon; n++) {
            long long t1 = n - (long long)q[n - 1];
            long long t2 = n - (long long)q[n - 2];
            if (t1 <= 0 || t2 <= 0) {
                status = ST_DEATH; step = n;
                bad1 = (t1 <= 0); bad2 = (t2 <= 0);
                break;
            }
            long long val = (long long)q[t1] + (long long)q[t2]
                          + ((n & 1) == 0 ? eps_even : eps_odd);
            if ((unsigned long long)val > cap) {
                status = ST_OVERFLOW; step = n;
                break;
            }
            q[n] = (uint32_t)val;
        }
    } else {
        uint64_t *q = (uint64_t *)view.buf;
        for (long long n = start; n <= horizon; n++) {
            long long t1 = n - (long long)q[n - 1];
            long long t2 = n - (long long)q[n - 2];
            if (t1 <= 0 || t2 <= 0) {
                status = ST_DEATH; step = n;
                bad1 = (t1 <= 0); bad2 = (t2 <= 0);
                break;
            }
            long long val = (long long)q[t1] + (long long)q[t2]
                          + ((n & 1) == 0 ? eps_even : eps_odd);
            if ((unsigned long long)val > cap) {
                status = ST_OVERFLOW; step = n;
                break;
            }
            q[n] = (uint64_t)val;
        }
    }

    PyBuffer_Release(&view);
    return Py_BuildValue("iLii", status, step, bad1, bad2);
}

/* count_values(values, n_max, counts, last_occurrence, m_cap)
 *   -> (status, aux)
 *
 * Single pass over q[1..n_max].  Every value must be odd (ST_PARITY,
 * aux = offending n).  Value v is binned at m = (v+1)/2; counts is a
 * 1-byte slot per m (ST_COUNT_OVERFLOW, aux = m, if a slot would pass
 * 255); last_occurrence is a 4-byte slot per m updated to n.  Values
 * with m > m_cap are only tallied: on ST_OK, aux is that tally.
 */
static PyObject *
count_values(PyObject *self, PyObject *args)
{
    Py_buffer qv, cv, lv;
    long long n_max, m_cap;

    if (!PyArg_ParseTuple(args, "y*Lw*w*L", &qv, &n_max, &cv, &lv, &m_cap))
        return NULL;

    int status = ST_OK;
    long long aux = 0;

    if ((qv.itemsize != 4 && qv.itemsize != 8) || cv.itemsize != 1 || lv.itemsize != 4) {
        PyErr_SetString(PyExc_ValueError, "unexpected buffer item sizes");
        goto done_err;
    }
    if ((long long)(qv.len / qv.itemsize) < n_max + 1
        || (long long)cv.len < m_cap + 1
        || (long long)(lv.len / lv.itemsize) < m_cap + 1) {
        PyErr_SetString(PyExc_ValueError, "buffer too short");
        goto done_err;
    }

    {
        uint8_t *counts = (uint8_t *)cv.buf;
        uint32_t *last = (uint32_t *)lv.buf;
        long long overflow = 0;
        for (long long n = 1; n <= n_max; n++) {
            long long v = (qv.itemsize == 4)
                ? (long long)((uint32_t *)qv.buf)[n]
                : (long long)((uint64_t *)qv.buf)[n];
            if ((v & 1) == 0) {
                status = ST_PARITY; aux = n;
                goto done;
            }
            long long m = (v + 1) >> 1;
            if (m <= m_cap) {
                if (counts[m] == 255) {
                    status = ST_COUNT_OVERFLOW; aux = m;
                    goto done;
                }
                counts[m]++;
                last[m] = (uint32_t)n;
            } else {
                overflow++;
            }
        }
        aux = overflow;
    }

done:
    PyBuffer_Release(&qv);
    PyBuffer_Release(&cv);
    PyBuffer_Release(&lv);
    return Py_BuildValue("iL", status, aux);

done_err:
    PyBuffer_Release(&qv);
    PyBuffer_Release(&cv);
    PyBuffer_Release(&lv);
    return NULL;
}

static PyMethodDef kernel_methods[] = {
    {"advance", advance, METH_VARARGS, "run the recursion in place"},
    {"count_values", count_values, METH_VARARGS, "tally odd values into dyadic bins"},
    {NULL, NULL, 0, NULL}
};

static struct PyModuleDef moduledef = {
    PyModuleDef_HEAD_INIT, "qseq._qkernel", NULL, -1, kernel_methods
};

PyMODINIT_FUNC
PyInit__qkernel(void)
{
    return PyModule_Create(&moduledef);
}
